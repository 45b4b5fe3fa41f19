/**
 * CTXE binary store: magic "CTXE", u32 version=1, u32 dim, then per-sentence
 * records [u32 id, u32 nTokens, nTokens*dim little-endian f32], terminated by
 * EOF or an optional trailer [magic "META", u32 length, UTF-8 provenance].
 * Vectors are truncated to f32 on write.
 */

export const CTXE_VERSION = 1

export interface StoreRecord {
  id: number
  vectors: Float64Array[] | Float32Array[] | number[][]
}

export function writeStore(
  dim: number,
  records: StoreRecord[],
  provenance = '',
): Buffer {
  const chunks: Buffer[] = []
  const header = Buffer.alloc(12)
  header.write('CTXE', 0, 'ascii')
  header.writeUInt32LE(CTXE_VERSION, 4)
  header.writeUInt32LE(dim, 8)
  chunks.push(header)

  for (const record of records) {
    if (record.vectors.length === 0) {
      throw new Error(`sentence ${record.id}: zero vectors`)
    }
    const head = Buffer.alloc(8)
    head.writeUInt32LE(record.id, 0)
    head.writeUInt32LE(record.vectors.length, 4)
    chunks.push(head)
    const body = Buffer.alloc(record.vectors.length * dim * 4)
    record.vectors.forEach((vector, t) => {
      if (vector.length !== dim) {
        throw new Error(
          `sentence ${record.id}, token ${t}: vector length ${vector.length} != ${dim}`,
        )
      }
      for (let d = 0; d < dim; d++) {
        body.writeFloatLE(Math.fround(Number(vector[d])), (t * dim + d) * 4)
      }
    })
    chunks.push(body)
  }

  if (provenance !== '') {
    const body = Buffer.from(provenance, 'utf-8')
    const trailer = Buffer.alloc(8)
    trailer.write('META', 0, 'ascii')
    trailer.writeUInt32LE(body.length, 4)
    chunks.push(trailer, body)
  }
  return Buffer.concat(chunks)
}

export interface ParsedStore {
  dim: number
  records: Map<number, Float32Array[]>
  provenance: string
}

/** Reader counterpart, used for roundtrip tests. */
export function readStore(buffer: Buffer): ParsedStore {
  if (buffer.length < 12 || buffer.toString('ascii', 0, 4) !== 'CTXE') {
    throw new Error('not a CTXE file')
  }
  const version = buffer.readUInt32LE(4)
  if (version !== CTXE_VERSION) throw new Error(`unsupported version ${version}`)
  const dim = buffer.readUInt32LE(8)

  const records = new Map<number, Float32Array[]>()
  let provenance = ''
  let offset = 12
  while (offset < buffer.length) {
    if (buffer.toString('ascii', offset, offset + 4) === 'META') {
      const length = buffer.readUInt32LE(offset + 4)
      provenance = buffer.toString('utf-8', offset + 8, offset + 8 + length)
      offset += 8 + length
      break
    }
    const id = buffer.readUInt32LE(offset)
    const nTokens = buffer.readUInt32LE(offset + 4)
    offset += 8
    const vectors: Float32Array[] = []
    for (let t = 0; t < nTokens; t++) {
      const vector = new Float32Array(dim)
      for (let d = 0; d < dim; d++) {
        vector[d] = buffer.readFloatLE(offset)
        offset += 4
      }
      vectors.push(vector)
    }
    records.set(id, vectors)
  }
  if (offset !== buffer.length) throw new Error('trailing bytes after trailer')
  return { dim, records, provenance }
}
