// ============================================================================
// Heatmap decoding and tinting.
//
// The server renders feature maps as binary PGM (grayscale, maxval 255).
// The explorer overlays them on image tiles using the convention:
// grayscale intensity becomes the alpha of a pure red layer, so intensity
// 1.0 (byte 255) is fully red and intensity 0 is transparent.
// ============================================================================

export interface GrayImage {
  width: number;
  height: number;
  pixels: Uint8Array;
}

export interface RedOverlay {
  width: number;
  height: number;
  /** RGBA, red channel fixed at 255, alpha = grayscale intensity. */
  rgba: Uint8ClampedArray<ArrayBuffer>;
}

export class PgmError extends Error {}

function isSpace(byte: number): boolean {
  return byte === 0x20 || byte === 0x09 || byte === 0x0a || byte === 0x0d;
}

/** Parse a binary (P5) PGM with maxval 255, as emitted by the server. */
export function parsePgm(bytes: Uint8Array): GrayImage {
  let pos = 0;
  const token = (): string => {
    while (pos < bytes.length && isSpace(bytes[pos]!)) pos += 1;
    const start = pos;
    while (pos < bytes.length && !isSpace(bytes[pos]!)) pos += 1;
    if (start === pos) throw new PgmError("truncated header");
    return String.fromCharCode(...bytes.subarray(start, pos));
  };

  const magic = token();
  if (magic !== "P5") throw new PgmError(`expected P5, found ${magic}`);
  const width = Number(token());
  const height = Number(token());
  const maxval = Number(token());
  if (!Number.isInteger(width) || !Number.isInteger(height) || width < 1 || height < 1) {
    throw new PgmError(`bad dimensions ${width}x${height}`);
  }
  if (maxval !== 255) throw new PgmError(`expected maxval 255, found ${maxval}`);
  pos += 1; // single whitespace byte after the header
  const pixels = bytes.subarray(pos);
  if (pixels.length !== width * height) {
    throw new PgmError(
      `expected ${width * height} pixels, found ${pixels.length}`
    );
  }
  return { width, height, pixels: new Uint8Array(pixels) };
}

/** Map grayscale intensity to a red overlay (alpha = intensity). */
export function tintRed(gray: GrayImage): RedOverlay {
  const rgba = new Uint8ClampedArray(gray.width * gray.height * 4);
  for (let i = 0; i < gray.pixels.length; i += 1) {
    rgba[i * 4] = 255;
    rgba[i * 4 + 1] = 0;
    rgba[i * 4 + 2] = 0;
    rgba[i * 4 + 3] = gray.pixels[i]!;
  }
  return { width: gray.width, height: gray.height, rgba };
}
