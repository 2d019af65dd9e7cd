/** Keyboard labeling: digit keys 1..K map to class indices 0..K−1. */

export function classIndexForKey(key: string, numClasses: number): number | null {
  if (!/^[1-9]$/.test(key)) return null;
  const index = Number(key) - 1;
  return index < numClasses ? index : null;
}

/** Attach a keydown listener; returns the detach function. */
export function bindHotkeys(
  numClasses: number,
  onLabel: (classIndex: number) => void,
  target: { addEventListener: Window["addEventListener"]; removeEventListener: Window["removeEventListener"] },
): () => void {
  const handler = (event: KeyboardEvent) => {
    const index = classIndexForKey(event.key, numClasses);
    if (index !== null) {
      event.preventDefault();
      onLabel(index);
    }
  };
  target.addEventListener("keydown", handler as EventListener);
  return () => target.removeEventListener("keydown", handler as EventListener);
}
