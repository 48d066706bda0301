/**
 * Minimal RFC-4180 CSV parsing and writing.
 *
 * Handles quoted fields, doubled-quote escapes, embedded commas/newlines
 * and both \n and \r\n line endings. Kept dependency-free so the compiled
 * adapter runs under plain node.
 */

export function parseCsv(text: string): string[][] {
  const rows: string[][] = [];
  let row: string[] = [];
  let field = "";
  let inQuotes = false;
  let i = 0;

  const pushField = () => {
    row.push(field);
    field = "";
  };
  const pushRow = () => {
    pushField();
    rows.push(row);
    row = [];
  };

  while (i < text.length) {
    const ch = text[i];
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i += 2;
          continue;
        }
        inQuotes = false;
        i += 1;
        continue;
      }
      field += ch;
      i += 1;
      continue;
    }
    if (ch === '"' && field.length === 0) {
      inQuotes = true;
      i += 1;
      continue;
    }
    if (ch === ",") {
      pushField();
      i += 1;
      continue;
    }
    if (ch === "\r" && text[i + 1] === "\n") {
      pushRow();
      i += 2;
      continue;
    }
    if (ch === "\n" || ch === "\r") {
      pushRow();
      i += 1;
      continue;
    }
    field += ch;
    i += 1;
  }
  if (inQuotes) {
    throw new Error("malformed CSV: unterminated quoted field");
  }
  if (field.length > 0 || row.length > 0) {
    pushRow();
  }
  return rows;
}

function formatCell(cell: string): string {
  if (/[",\n\r]/.test(cell)) {
    return '"' + cell.replace(/"/g, '""') + '"';
  }
  return cell;
}

export function formatCsv(rows: string[][]): string {
  return rows.map((row) => row.map(formatCell).join(",")).join("\n") + "\n";
}
