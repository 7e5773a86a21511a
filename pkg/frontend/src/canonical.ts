// Canonical JSON matching the engine's serializer byte for byte:
// two-space indent, insertion-ordered keys, ASCII-escaped, trailing newline.

function escapeNonAscii(text: string): string {
  return text.replace(/[-￿]/g, (ch) => {
    return "\\u" + ch.charCodeAt(0).toString(16).padStart(4, "0");
  });
}

export function canonicalJson(value: unknown): string {
  return escapeNonAscii(JSON.stringify(value, null, 2)) + "\n";
}
