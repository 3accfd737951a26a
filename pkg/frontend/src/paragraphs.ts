// Client-side paragraph segmentation, matching the server's rule:
// paragraphs are maximal runs of non-blank lines. Offsets let the editor
// highlight a paragraph (or a char range inside one) in place.

export interface ParagraphBlock {
  index: number;
  text: string;
  start: number;
  end: number;
}

export function splitParagraphBlocks(text: string): ParagraphBlock[] {
  const lines = text.split("\n");
  const blocks: ParagraphBlock[] = [];
  let offset = 0;
  let runStart = -1;
  let runEnd = -1;

  const flush = () => {
    if (runStart >= 0) {
      blocks.push({
        index: blocks.length,
        text: text.slice(runStart, runEnd),
        start: runStart,
        end: runEnd,
      });
      runStart = -1;
    }
  };

  for (const line of lines) {
    const blank = line.trim() === "";
    if (blank) {
      flush();
    } else {
      if (runStart < 0) runStart = offset;
      runEnd = offset + line.length;
    }
    offset += line.length + 1;
  }
  flush();
  return blocks;
}
