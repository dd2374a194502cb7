/** Minimal 16-bit PCM RIFF/WAVE writer (planar input, interleaved on disk). */

export function writeWav16(channels: Float64Array[], sampleRate: number): Buffer {
  const nCh = channels.length;
  const frames = channels[0].length;
  const payload = Buffer.alloc(frames * nCh * 2);
  for (let n = 0; n < frames; n++) {
    for (let c = 0; c < nCh; c++) {
      let q = Math.round(channels[c][n] * 32768);
      if (q > 32767) q = 32767;
      if (q < -32768) q = -32768;
      payload.writeInt16LE(q, (n * nCh + c) * 2);
    }
  }
  const block = nCh * 2;
  const header = Buffer.alloc(44);
  header.write("RIFF", 0, "ascii");
  header.writeUInt32LE(36 + payload.length, 4);
  header.write("WAVE", 8, "ascii");
  header.write("fmt ", 12, "ascii");
  header.writeUInt32LE(16, 16);
  header.writeUInt16LE(1, 20); // PCM
  header.writeUInt16LE(nCh, 22);
  header.writeUInt32LE(sampleRate, 24);
  header.writeUInt32LE(sampleRate * block, 28);
  header.writeUInt16LE(block, 32);
  header.writeUInt16LE(16, 34);
  header.write("data", 36, "ascii");
  header.writeUInt32LE(payload.length, 40);
  return Buffer.concat([header, payload]);
}
