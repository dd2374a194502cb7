/**
 * NPW1 tensor container writer/reader (little-endian).
 *
 * Layout: magic "NPW1", u32 version=1, u32 tensor count, then per tensor:
 * u16 name length, UTF-8 name, u8 dtype (0 = f32), u8 ndim, ndim x u32 dims,
 * row-major f32 payload. Tensors are written sorted by name so identical
 * contents always produce identical bytes.
 */

export interface Tensor {
  dims: number[];
  data: Float32Array;
}

export type TensorMap = Map<string, Tensor>;

export function tensor(dims: number[], values: ArrayLike<number>): Tensor {
  const numel = dims.reduce((a, b) => a * b, 1);
  if (values.length !== numel) {
    throw new Error(`tensor payload ${values.length} != dims product ${numel}`);
  }
  return { dims: [...dims], data: Float32Array.from(values) };
}

export function writeContainer(tensors: TensorMap): Buffer {
  const names = [...tensors.keys()].sort();
  const parts: Buffer[] = [];
  const head = Buffer.alloc(12);
  head.write("NPW1", 0, "ascii");
  head.writeUInt32LE(1, 4);
  head.writeUInt32LE(names.length, 8);
  parts.push(head);
  for (const name of names) {
    const t = tensors.get(name)!;
    const nameBytes = Buffer.from(name, "utf-8");
    const header = Buffer.alloc(2 + nameBytes.length + 2 + 4 * t.dims.length);
    let off = 0;
    header.writeUInt16LE(nameBytes.length, off);
    off += 2;
    nameBytes.copy(header, off);
    off += nameBytes.length;
    header.writeUInt8(0, off); // dtype f32
    off += 1;
    header.writeUInt8(t.dims.length, off);
    off += 1;
    for (const d of t.dims) {
      header.writeUInt32LE(d, off);
      off += 4;
    }
    parts.push(header);
    const payload = Buffer.alloc(4 * t.data.length);
    for (let i = 0; i < t.data.length; i++) {
      payload.writeFloatLE(t.data[i], 4 * i);
    }
    parts.push(payload);
  }
  return Buffer.concat(parts);
}

export function readContainer(buf: Buffer): TensorMap {
  if (buf.length < 12 || buf.toString("ascii", 0, 4) !== "NPW1") {
    throw new Error("not an NPW1 container");
  }
  const version = buf.readUInt32LE(4);
  if (version !== 1) throw new Error(`unsupported version ${version}`);
  const count = buf.readUInt32LE(8);
  let off = 12;
  const out: TensorMap = new Map();
  for (let i = 0; i < count; i++) {
    const nameLen = buf.readUInt16LE(off);
    off += 2;
    const name = buf.toString("utf-8", off, off + nameLen);
    off += nameLen;
    const dtype = buf.readUInt8(off);
    off += 1;
    if (dtype !== 0) throw new Error(`tensor ${name}: unknown dtype ${dtype}`);
    const ndim = buf.readUInt8(off);
    off += 1;
    const dims: number[] = [];
    for (let d = 0; d < ndim; d++) {
      dims.push(buf.readUInt32LE(off));
      off += 4;
    }
    const numel = dims.reduce((a, b) => a * b, 1);
    const data = new Float32Array(numel);
    for (let k = 0; k < numel; k++) {
      data[k] = buf.readFloatLE(off);
      off += 4;
    }
    out.set(name, { dims, data });
  }
  return out;
}
