/**
 * Reader for the annotated-corpus column format: one `token<TAB>tag` line per
 * token, blank line between sentences, optional `# id: N` comment before a
 * sentence.  Tags are carried through but not interpreted here.
 */

export interface CorpusSentence {
  id: number
  tokens: string[]
  tags: string[]
}

export function parseCorpus(text: string): CorpusSentence[] {
  const sentences: CorpusSentence[] = []
  const seen = new Set<number>()
  let tokens: string[] = []
  let tags: string[] = []
  let pendingId: number | null = null

  const close = (lineno: number) => {
    if (tokens.length === 0) {
      if (pendingId !== null) {
        throw new Error(`line ${lineno}: id comment without sentence`)
      }
      return
    }
    const id = pendingId ?? sentences.length
    if (seen.has(id)) throw new Error(`duplicate sentence id ${id}`)
    seen.add(id)
    sentences.push({ id, tokens, tags })
    tokens = []
    tags = []
    pendingId = null
  }

  const lines = text.split('\n')
  lines.forEach((line, index) => {
    const lineno = index + 1
    if (line.trim() === '') {
      close(lineno)
      return
    }
    if (line.startsWith('#')) {
      const body = line.slice(1).trim()
      if (!body.startsWith('id:')) return
      if (tokens.length > 0) {
        throw new Error(`line ${lineno}: id comment inside a sentence`)
      }
      const id = Number(body.slice(3).trim())
      if (!Number.isInteger(id) || id < 0) {
        throw new Error(`line ${lineno}: malformed id comment`)
      }
      pendingId = id
      return
    }
    const parts = line.split('\t')
    if (parts.length !== 2 || parts[0] === '') {
      throw new Error(`line ${lineno}: expected token<TAB>tag`)
    }
    tokens.push(parts[0])
    tags.push(parts[1])
  })
  close(lines.length)
  return sentences
}
