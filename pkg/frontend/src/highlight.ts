// Editor highlighting: a backdrop <div> sits behind the transparent
// textarea and renders the same text with <mark> spans. The textarea stays
// the single source of truth for the text; the backdrop only paints.

export interface HighlightSpan {
  start: number;
  end: number;
  kind: "flash" | "retained" | "cut";
}

function escapeHtml(raw: string): string {
  return raw
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;");
}

export function renderBackdrop(text: string, spans: HighlightSpan[]): string {
  const ordered = [...spans].sort((a, b) => a.start - b.start);
  let html = "";
  let cursor = 0;
  for (const span of ordered) {
    if (span.start < cursor) continue; // overlapping spans: first wins
    html += escapeHtml(text.slice(cursor, span.start));
    html += `<mark class="hl-${span.kind}">${escapeHtml(text.slice(span.start, span.end))}</mark>`;
    cursor = span.end;
  }
  html += escapeHtml(text.slice(cursor));
  // Trailing newline needs a visible line for scroll parity.
  return html + "\n";
}
