// Label schemas, mirrored from the service. Order is canonical: it drives
// both button layout and the 1..K key bindings, so it must match the
// server's class order exactly (the /api/next response re-confirms it).

export type Task = "roof_type" | "roof_material";

export const TASK_CLASSES: Record<Task, readonly string[]> = {
  roof_type: ["Gable", "Hip", "Flat", "No Roof"],
  roof_material: ["Healthy metal", "Irregular metal", "Concrete/cement", "Blue tarpaulin", "Incomplete"],
};

export const SKIP_KEY = "0";

/** Key "1".."K" for the task's classes, in canonical order. */
export function keyBindings(classes: readonly string[]): Map<string, string> {
  const bindings = new Map<string, string>();
  classes.forEach((cls, i) => bindings.set(String(i + 1), cls));
  return bindings;
}

export function labelForKey(classes: readonly string[], key: string): string | null {
  return keyBindings(classes).get(key) ?? null;
}
