import * as fs from 'node:fs'
import * as os from 'node:os'
import * as path from 'node:path'

import { describe, expect, it } from 'vitest'

import {
  embedSentence,
  loadModel,
  makeModel,
  outputDim,
} from '../src/charlm'

describe('makeModel / loadModel', () => {
  it('is deterministic for a fixed seed', () => {
    const a = makeModel('m', 42)
    const b = makeModel('m', 42)
    expect(a).toEqual(b)
    expect(makeModel('m', 43)).not.toEqual(a)
  })

  it('roundtrips through a model file', () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'charlm-'))
    const file = path.join(dir, 'toy.charlm.json')
    const model = makeModel('toy', 5, 6, 4)
    fs.writeFileSync(file, JSON.stringify(model))
    expect(loadModel(file)).toEqual(model)
  })

  it('raises a missing-model error', () => {
    expect(() => loadModel('/no/such/model.json')).toThrow(/missing model/)
  })

  it('rejects inconsistent weight shapes', () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'charlm-'))
    const file = path.join(dir, 'broken.charlm.json')
    const model = makeModel('broken', 5)
    model.forward.w = model.forward.w.slice(1)
    fs.writeFileSync(file, JSON.stringify(model))
    expect(() => loadModel(file)).toThrow(/size mismatch/)
  })
})

describe('embedSentence', () => {
  const model = makeModel('unit', 9, 10, 6)

  it('produces one vector per token at twice the state width', () => {
    const vectors = embedSentence(model, ['hello', 'world'])
    expect(vectors).toHaveLength(2)
    for (const v of vectors) expect(v).toHaveLength(outputDim(model))
    expect(outputDim(model)).toBe(2 * model.stateDim)
  })

  it('is deterministic', () => {
    const a = embedSentence(model, ['same', 'input'])
    const b = embedSentence(model, ['same', 'input'])
    expect(a).toEqual(b)
  })

  it('handles non-ASCII tokens with correct alignment', () => {
    const vectors = embedSentence(model, ['naïve', 'test'])
    expect(vectors).toHaveLength(2)
    expect(vectors[0].some((x) => x !== 0)).toBe(true)
  })

  it('depends on context: same word embeds differently in different sentences', () => {
    const [a] = embedSentence(model, ['storm', 'hits'])
    const [b] = embedSentence(model, ['storm', 'fades'])
    // forward halves agree up to the word end; backward halves must differ
    expect(Array.from(a.slice(0, model.stateDim))).toEqual(
      Array.from(b.slice(0, model.stateDim)),
    )
    expect(Array.from(a.slice(model.stateDim))).not.toEqual(
      Array.from(b.slice(model.stateDim)),
    )
  })

  it('forward half reflects everything up to the word end', () => {
    const [, second] = embedSentence(model, ['alpha', 'beta'])
    const [, secondChanged] = embedSentence(model, ['gamma', 'beta'])
    expect(Array.from(second.slice(0, model.stateDim))).not.toEqual(
      Array.from(secondChanged.slice(0, model.stateDim)),
    )
  })
})
