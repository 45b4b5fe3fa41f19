/**
 * Character-level language model states for per-word contextual vectors.
 *
 * A model file holds a forward and a backward tanh-RNN over characters.  The
 * sentence's tokens are joined with single spaces into one character stream;
 * a word's vector is the forward state right after its last character
 * concatenated with the backward state right before its first character, so
 * the output width is twice the RNN state width.
 */

import * as fs from 'node:fs'

export interface RnnWeights {
  /** (alphabet size + 1) x charDim, row-major; the extra row is the
   *  unknown-character embedding. */
  emb: number[]
  /** charDim x stateDim */
  w: number[]
  /** stateDim x stateDim */
  u: number[]
  /** stateDim */
  b: number[]
}

export interface CharLmModel {
  name: string
  alphabet: string
  charDim: number
  stateDim: number
  forward: RnnWeights
  backward: RnnWeights
}

function checkWeights(model: CharLmModel, which: 'forward' | 'backward'): void {
  const { charDim, stateDim } = model
  const rows = model.alphabet.length + 1
  const weights = model[which]
  if (weights.emb.length !== rows * charDim) {
    throw new Error(`${model.name}: ${which} embedding size mismatch`)
  }
  if (weights.w.length !== charDim * stateDim) {
    throw new Error(`${model.name}: ${which} input matrix size mismatch`)
  }
  if (weights.u.length !== stateDim * stateDim) {
    throw new Error(`${model.name}: ${which} recurrent matrix size mismatch`)
  }
  if (weights.b.length !== stateDim) {
    throw new Error(`${model.name}: ${which} bias size mismatch`)
  }
}

export function loadModel(path: string): CharLmModel {
  if (!fs.existsSync(path)) {
    throw new Error(`missing model: ${path}`)
  }
  const model = JSON.parse(fs.readFileSync(path, 'utf-8')) as CharLmModel
  for (const field of ['name', 'alphabet', 'charDim', 'stateDim'] as const) {
    if (model[field] === undefined) {
      throw new Error(`model file ${path} lacks field ${field}`)
    }
  }
  checkWeights(model, 'forward')
  checkWeights(model, 'backward')
  return model
}

/** Deterministic 32-bit PRNG for generated fixture models. */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0
  return () => {
    a |= 0
    a = (a + 0x6d2b79f5) | 0
    let t = Math.imul(a ^ (a >>> 15), 1 | a)
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
}

const DEFAULT_ALPHABET =
  ' abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789' +
  ".,;:!?'\"()-éèüöäß"

/** Build a seeded random model; stands in for a real pretrained checkpoint. */
export function makeModel(
  name: string,
  seed = 1,
  stateDim = 12,
  charDim = 8,
  alphabet: string = DEFAULT_ALPHABET,
): CharLmModel {
  const next = mulberry32(seed)
  const uniform = (n: number, scale: number) =>
    Array.from({ length: n }, () => (next() * 2 - 1) * scale)
  const weights = (): RnnWeights => ({
    emb: uniform((alphabet.length + 1) * charDim, 0.8),
    w: uniform(charDim * stateDim, 0.5),
    u: uniform(stateDim * stateDim, 0.3),
    b: uniform(stateDim, 0.1),
  })
  return { name, alphabet, charDim, stateDim, forward: weights(), backward: weights() }
}

function charIndex(model: CharLmModel, ch: string): number {
  const i = model.alphabet.indexOf(ch)
  return i >= 0 ? i : model.alphabet.length
}

/** States after consuming each character, in consumption order. */
function runRnn(model: CharLmModel, weights: RnnWeights, chars: string[]): Float64Array[] {
  const { charDim, stateDim } = model
  let h = new Float64Array(stateDim)
  const states: Float64Array[] = []
  for (const ch of chars) {
    const row = charIndex(model, ch) * charDim
    const out = new Float64Array(stateDim)
    for (let j = 0; j < stateDim; j++) {
      let acc = weights.b[j]
      for (let d = 0; d < charDim; d++) {
        acc += weights.emb[row + d] * weights.w[d * stateDim + j]
      }
      for (let d = 0; d < stateDim; d++) {
        acc += h[d] * weights.u[d * stateDim + j]
      }
      out[j] = Math.tanh(acc)
    }
    h = out
    states.push(out)
  }
  return states
}

/**
 * One vector per token: [forward state after the token's last character,
 * backward state before its first character], length 2 * stateDim.
 */
export function embedSentence(model: CharLmModel, tokens: string[]): Float64Array[] {
  if (tokens.length === 0) return []
  const text = tokens.join(' ')
  const chars = Array.from(text)

  // character span of each token within the joined stream
  const spans: Array<{ start: number; end: number }> = []
  let pos = 0
  for (const token of tokens) {
    const length = Array.from(token).length
    spans.push({ start: pos, end: pos + length })
    pos += length + 1
  }

  const fwd = runRnn(model, model.forward, chars)
  const bwdRev = runRnn(model, model.backward, [...chars].reverse())
  const last = chars.length - 1

  return spans.map(({ start, end }) => {
    const vector = new Float64Array(2 * model.stateDim)
    vector.set(fwd[end - 1], 0)
    vector.set(bwdRev[last - start], model.stateDim)
    return vector
  })
}

export function outputDim(model: CharLmModel): number {
  return 2 * model.stateDim
}
