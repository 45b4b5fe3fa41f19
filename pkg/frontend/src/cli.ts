#!/usr/bin/env node
/**
 * embed-export: materialize per-token contextual vectors for a corpus into
 * the CTXE binary store consumed by the tagging toolkit.
 *
 *   export        --corpus X --embedder NAME --out Y [--models-dir D]
 *   convert-words --input IN --out OUT
 *   make-model    --out PATH [--name N] [--seed S] [--state-dim K] [--char-dim K]
 */

import * as fs from 'node:fs'
import * as path from 'node:path'

import { parseCorpus } from './corpus'
import {
  CharLmModel,
  embedSentence,
  loadModel,
  makeModel,
  outputDim,
} from './charlm'
import { StoreRecord, writeStore } from './ctxe'
import { convertWordVectors } from './wordvec'

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>()
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i]
    if (!key.startsWith('--') || i + 1 >= argv.length) {
      throw new UsageError(`bad argument ${key}`)
    }
    flags.set(key.slice(2), argv[i + 1])
  }
  return flags
}

class UsageError extends Error {}

function required(flags: Map<string, string>, name: string): string {
  const value = flags.get(name)
  if (value === undefined) throw new UsageError(`--${name} is required`)
  return value
}

function resolveModel(embedder: string, modelsDir: string): CharLmModel {
  if (fs.existsSync(embedder)) return loadModel(embedder)
  const candidate = path.join(modelsDir, `${embedder}.charlm.json`)
  if (fs.existsSync(candidate)) return loadModel(candidate)
  throw new Error(`missing model: no file ${embedder} or ${candidate}`)
}

export type SentenceEmbedder = (tokens: string[]) => Float64Array[]

export function exportContextual(
  corpusPath: string,
  model: CharLmModel,
  outPath: string,
  embed: SentenceEmbedder = (tokens) => embedSentence(model, tokens),
): { sentences: number; dim: number } {
  const sentences = parseCorpus(fs.readFileSync(corpusPath, 'utf-8'))
  const dim = outputDim(model)
  const records: StoreRecord[] = sentences.map((sentence) => {
    const vectors = embed(sentence.tokens)
    if (vectors.length !== sentence.tokens.length) {
      throw new Error(
        `sentence ${sentence.id}: embedder produced ${vectors.length} vectors ` +
          `for ${sentence.tokens.length} tokens; aborting`,
      )
    }
    return { id: sentence.id, vectors }
  })
  fs.writeFileSync(outPath, writeStore(dim, records, model.name))
  return { sentences: records.length, dim }
}

function cmdExport(flags: Map<string, string>): void {
  const model = resolveModel(
    required(flags, 'embedder'),
    flags.get('models-dir') ?? '.',
  )
  const { sentences, dim } = exportContextual(
    required(flags, 'corpus'),
    model,
    required(flags, 'out'),
  )
  process.stderr.write(
    `exported ${sentences} sentences at dim ${dim} (${model.name})\n`,
  )
}

function cmdConvertWords(flags: Map<string, string>): void {
  const text = fs.readFileSync(required(flags, 'input'), 'utf-8')
  fs.writeFileSync(required(flags, 'out'), convertWordVectors(text))
}

function cmdMakeModel(flags: Map<string, string>): void {
  const outPath = required(flags, 'out')
  const model = makeModel(
    flags.get('name') ?? path.basename(outPath, '.charlm.json'),
    Number(flags.get('seed') ?? 1),
    Number(flags.get('state-dim') ?? 12),
    Number(flags.get('char-dim') ?? 8),
  )
  fs.writeFileSync(outPath, JSON.stringify(model))
  process.stderr.write(`wrote model ${model.name} (state dim ${model.stateDim})\n`)
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv
  try {
    const flags = parseFlags(rest)
    switch (command) {
      case 'export':
        cmdExport(flags)
        return 0
      case 'convert-words':
        cmdConvertWords(flags)
        return 0
      case 'make-model':
        cmdMakeModel(flags)
        return 0
      default:
        throw new UsageError(`unknown command ${command ?? '(none)'}`)
    }
  } catch (error) {
    if (error instanceof UsageError) {
      process.stderr.write(`usage error: ${error.message}\n`)
      return 2
    }
    process.stderr.write(`error: ${(error as Error).message}\n`)
    return 1
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)))
}
