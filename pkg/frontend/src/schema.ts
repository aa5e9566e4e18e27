// Label vocabulary and submission checks, kept in lockstep with the
// server; a shared fixture of accepted and rejected records pins the
// two implementations together.

export const VALIDITY_LABELS = [
  "unsolvable",
  "single_candidate",
  "ambiguous",
  "valid",
] as const;

export const SKILL_LABELS = [
  "word_matching",
  "paraphrasing",
  "knowledge",
  "meta_whole",
  "math_logic",
] as const;

export const RELATION_LABELS = [
  "coreference",
  "causal",
  "spatial_temporal",
  "none",
] as const;

export const RECORD_FIELDS = new Set([
  "task_id",
  "annotator_id",
  "timestamp",
  "validity",
  "skill",
  "multi_sentence",
  "relation",
  "note",
]);

export interface AnnotationRecord {
  task_id: string;
  annotator_id: string;
  timestamp: string;
  validity: string;
  skill?: string;
  multi_sentence?: boolean;
  relation?: string;
  note?: string;
}

/** Missing and explicit-null both count as absent, as on the server. */
function field(body: Record<string, unknown>, name: string): unknown {
  const value = body[name];
  return value === undefined ? null : value;
}

export function validateRecord(body: unknown): string[] {
  if (body === null || typeof body !== "object" || Array.isArray(body)) {
    return ["record must be an object"];
  }
  const record = body as Record<string, unknown>;
  const violations: string[] = [];
  for (const extra of Object.keys(record).filter((k) => !RECORD_FIELDS.has(k)).sort()) {
    violations.push(`unknown field '${extra}'`);
  }
  for (const name of ["task_id", "annotator_id", "timestamp"]) {
    const value = field(record, name);
    if (typeof value !== "string" || value.trim() === "") {
      violations.push(`${name} must be a non-empty string`);
    }
  }

  const validity = field(record, "validity");
  if (!(VALIDITY_LABELS as readonly unknown[]).includes(validity)) {
    violations.push(`validity must be one of ${VALIDITY_LABELS.join(", ")}`);
  }
  const isValid = validity === "valid";

  const skill = field(record, "skill");
  if (skill !== null && !(SKILL_LABELS as readonly unknown[]).includes(skill)) {
    violations.push(`skill must be one of ${SKILL_LABELS.join(", ")}`);
  }
  if (isValid && skill === null) {
    violations.push("valid items need exactly one skill");
  }
  if (!isValid && skill !== null) {
    violations.push("skill is only annotated on valid items");
  }

  const multi = field(record, "multi_sentence");
  if (multi !== null && typeof multi !== "boolean") {
    violations.push("multi_sentence must be a boolean");
  }
  if (isValid && multi === null) {
    violations.push("valid items need the multi_sentence flag");
  }
  if (!isValid && multi !== null) {
    violations.push("multi_sentence is only annotated on valid items");
  }

  const relation = field(record, "relation");
  if (relation !== null && !(RELATION_LABELS as readonly unknown[]).includes(relation)) {
    violations.push(`relation must be one of ${RELATION_LABELS.join(", ")}`);
  }
  if (multi === true && relation === null) {
    violations.push("multi-sentence items need a relation (none is allowed)");
  }
  if (multi !== true && relation !== null) {
    violations.push("relation is only annotated on multi-sentence items");
  }

  const note = field(record, "note");
  if (note !== null && typeof note !== "string") {
    violations.push("note must be a string");
  }
  return violations;
}
