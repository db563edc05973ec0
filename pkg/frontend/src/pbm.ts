/** Decode the server's base64 P4 (binary portable bitmap) images into
 * ImageData-ready pixel buffers. */

export interface Bitmap {
  width: number;
  height: number;
  /** Row-major booleans, true = black. */
  pixels: boolean[];
}

export function decodePbm(base64: string): Bitmap {
  const bytes = Uint8Array.from(atob(base64), (c) => c.charCodeAt(0));
  // header: "P4" <ws> width <ws> height <single ws>, then packed bits
  let pos = 0;
  const token = (): string => {
    while (pos < bytes.length && /\s/.test(String.fromCharCode(bytes[pos]!))) pos++;
    const start = pos;
    while (pos < bytes.length && !/\s/.test(String.fromCharCode(bytes[pos]!))) pos++;
    return String.fromCharCode(...bytes.subarray(start, pos));
  };
  const magic = token();
  if (magic !== "P4") throw new Error(`expected P4 bitmap, got ${magic}`);
  const width = parseInt(token(), 10);
  const height = parseInt(token(), 10);
  pos += 1; // the single whitespace byte before the raster
  const rowBytes = Math.ceil(width / 8);
  const pixels: boolean[] = new Array(width * height).fill(false);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const byte = bytes[pos + y * rowBytes + (x >> 3)]!;
      pixels[y * width + x] = ((byte >> (7 - (x & 7))) & 1) === 1;
    }
  }
  return { width, height, pixels };
}
