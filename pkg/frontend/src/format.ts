// Shared number formatting. Panels must display API values through these
// helpers only, so the end-to-end test can check screen text against the
// raw responses.

export function pct(value: number): string {
  return (100 * value).toFixed(1) + "%";
}

export function belief(value: number): string {
  return value.toFixed(4);
}

export function gain(bits: number): string {
  return bits.toFixed(3) + " bits";
}

export function cost(value: number): string {
  return value % 1 === 0 ? value.toFixed(0) : value.toFixed(2);
}

export function score(value: number): string {
  return value.toFixed(3);
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
