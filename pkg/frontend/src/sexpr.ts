/** Pretty printer for the service's parenthesized formula strings. */

type Node = string | Node[];

function tokenize(text: string): string[] {
  return text
    .replace(/\(/g, " ( ")
    .replace(/\)/g, " ) ")
    .split(/\s+/)
    .filter((t) => t.length > 0);
}

function parse(tokens: string[]): Node {
  let index = 0;
  const read = (): Node => {
    const token = tokens[index];
    if (token === undefined) throw new Error("unbalanced formula text");
    index += 1;
    if (token === "(") {
      const items: Node[] = [];
      while (tokens[index] !== ")") {
        if (tokens[index] === undefined) throw new Error("unbalanced formula text");
        items.push(read());
      }
      index += 1;
      return items;
    }
    if (token === ")") throw new Error("unbalanced formula text");
    return token;
  };
  const root = read();
  if (index !== tokens.length) throw new Error("trailing formula text");
  return root;
}

function flat(node: Node): string {
  if (typeof node === "string") return node;
  return `(${node.map(flat).join(" ")})`;
}

function render(node: Node, indent: number, width: number): string {
  const oneLine = flat(node);
  if (typeof node === "string" || indent + oneLine.length <= width || node.length <= 1) {
    return oneLine;
  }
  const [head, ...rest] = node;
  const pad = " ".repeat(indent + 2);
  // Keep a quantifier's variable list on the head line.
  const isQuantifier =
    typeof head === "string" && (head === "exists" || head === "forall") && rest.length >= 1;
  const headText = isQuantifier ? `${flat(head)} ${flat(rest[0])}` : flat(head);
  const body = isQuantifier ? rest.slice(1) : rest;
  const lines = body.map((child) => pad + render(child, indent + 2, width));
  return `(${headText}\n${lines.join("\n")})`;
}

/** Lay out a formula string over multiple indented lines when it exceeds `width`. */
export function prettyFormula(text: string, width = 64): string {
  return render(parse(tokenize(text)), 0, width);
}
