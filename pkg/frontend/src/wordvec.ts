/**
 * Word-vector conversion: accepts the common pretrained text layouts
 * (word2vec with a "count dim" header, or GloVe-style header-less rows) and
 * emits the canonical table format `vocab_size dim` + one row per word.
 * Value tokens are passed through verbatim so no precision is lost.
 */

export function convertWordVectors(text: string): string {
  const lines = text.split('\n').filter((line) => line.trim() !== '')
  if (lines.length === 0) throw new Error('empty word-vector file')

  let start = 0
  const first = lines[0].trim().split(/\s+/)
  if (first.length === 2 && first.every((t) => /^\d+$/.test(t))) {
    start = 1 // word2vec header
  }
  const rows = lines.slice(start)
  if (rows.length === 0) throw new Error('no vector rows')

  let dim = -1
  const out: string[] = []
  rows.forEach((line, index) => {
    const parts = line.trim().split(/\s+/)
    if (parts.length < 2) {
      throw new Error(`row ${index + 1}: expected word and vector`)
    }
    const values = parts.slice(1)
    values.forEach((value) => {
      if (Number.isNaN(Number(value))) {
        throw new Error(`row ${index + 1}: non-numeric component ${value}`)
      }
    })
    if (dim === -1) dim = values.length
    else if (values.length !== dim) {
      throw new Error(
        `row ${index + 1}: ${values.length} components, expected ${dim}`,
      )
    }
    out.push(`${parts[0]} ${values.join(' ')}`)
  })
  return `${out.length} ${dim}\n${out.join('\n')}\n`
}
