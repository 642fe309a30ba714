// ============================================================================
// Raw-literal JSON scan.
//
// JSON.parse followed by String() does not round-trip number formatting:
// the server writes 17-significant-digit literals like 0.10000000000000001,
// which JavaScript would re-render as "0.1".  To display metrics with the
// exact bytes the server sent, this scanner walks the response text once
// and records the source substring of every number, keyed by its JSON path
// ("tree.split.threshold", "modes.0.er", ...).  Rendering then looks up
// the literal instead of stringifying the parsed value.
// ============================================================================

export type RawLiteralMap = Map<string, string>;

const NUMBER_RE = /^-?(?:0|[1-9][0-9]*)(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?/;

class Scanner {
  private pos = 0;

  constructor(
    private readonly text: string,
    private readonly out: RawLiteralMap
  ) {}

  scan(): void {
    this.skipWhitespace();
    this.value([]);
    this.skipWhitespace();
    if (this.pos !== this.text.length) {
      throw new SyntaxError(`trailing content at offset ${this.pos}`);
    }
  }

  private fail(message: string): never {
    throw new SyntaxError(`${message} at offset ${this.pos}`);
  }

  private peek(): string {
    const ch = this.text[this.pos];
    if (ch === undefined) this.fail("unexpected end of input");
    return ch;
  }

  private skipWhitespace(): void {
    while (this.pos < this.text.length) {
      const ch = this.text[this.pos];
      if (ch === " " || ch === "\t" || ch === "\n" || ch === "\r") this.pos += 1;
      else break;
    }
  }

  private expect(ch: string): void {
    if (this.text[this.pos] !== ch) this.fail(`expected ${JSON.stringify(ch)}`);
    this.pos += 1;
  }

  private value(path: (string | number)[]): void {
    const ch = this.peek();
    if (ch === "{") this.object(path);
    else if (ch === "[") this.array(path);
    else if (ch === '"') this.string();
    else if (ch === "t") this.literal("true");
    else if (ch === "f") this.literal("false");
    else if (ch === "n") this.literal("null");
    else this.number(path);
  }

  private object(path: (string | number)[]): void {
    this.expect("{");
    this.skipWhitespace();
    if (this.peek() === "}") {
      this.pos += 1;
      return;
    }
    for (;;) {
      this.skipWhitespace();
      const key = this.string();
      this.skipWhitespace();
      this.expect(":");
      this.skipWhitespace();
      path.push(key);
      this.value(path);
      path.pop();
      this.skipWhitespace();
      if (this.peek() === ",") {
        this.pos += 1;
        continue;
      }
      this.expect("}");
      return;
    }
  }

  private array(path: (string | number)[]): void {
    this.expect("[");
    this.skipWhitespace();
    if (this.peek() === "]") {
      this.pos += 1;
      return;
    }
    let index = 0;
    for (;;) {
      this.skipWhitespace();
      path.push(index);
      this.value(path);
      path.pop();
      index += 1;
      this.skipWhitespace();
      if (this.peek() === ",") {
        this.pos += 1;
        continue;
      }
      this.expect("]");
      return;
    }
  }

  private string(): string {
    const start = this.pos;
    this.expect('"');
    while (this.pos < this.text.length) {
      const ch = this.text[this.pos];
      if (ch === "\\") {
        this.pos += 2;
        continue;
      }
      if (ch === '"') {
        this.pos += 1;
        return JSON.parse(this.text.slice(start, this.pos)) as string;
      }
      this.pos += 1;
    }
    this.fail("unterminated string");
  }

  private literal(word: string): void {
    if (this.text.startsWith(word, this.pos)) {
      this.pos += word.length;
      return;
    }
    this.fail(`expected ${word}`);
  }

  private number(path: (string | number)[]): void {
    const match = NUMBER_RE.exec(this.text.slice(this.pos));
    if (!match || match[0].length === 0) this.fail("expected a JSON value");
    this.out.set(path.join("."), match[0]);
    this.pos += match[0].length;
  }
}

/** Map every number in a JSON text to its exact source literal. */
export function scanRawLiterals(text: string): RawLiteralMap {
  const out: RawLiteralMap = new Map();
  new Scanner(text, out).scan();
  return out;
}

/**
 * Look up the source literal for a numeric field.  Falling back to
 * String(value) would silently break byte fidelity, so a missing path is
 * an error.
 */
export function rawLiteral(raw: RawLiteralMap, path: string): string {
  const literal = raw.get(path);
  if (literal === undefined) {
    throw new Error(`no raw literal recorded for path ${path}`);
  }
  return literal;
}
