#!/usr/bin/env python3
"""Convert a flat gate-level ISCAS85 Verilog netlist into BENCH format.

Handles the primitive-gate subset (and/nand/or/nor/xor/xnor/not/buf) plus
`assign a = b;` and `assign a = 1'bX;`.
"""
import re
import sys

GATES = {"and": "AND", "nand": "NAND", "or": "OR", "nor": "NOR",
         "xor": "XOR", "xnor": "XNOR", "not": "NOT", "buf": "BUFF"}


def main(path, out):
    text = open(path).read()
    text = re.sub(r"//[^\n]*", "", text)
    stmts = [s.strip() for s in text.replace("\n", " ").split(";")]
    inputs, outputs, lines = [], [], []
    for s in stmts:
        if not s:
            continue
        head = s.split()[0]
        if head == "input":
            inputs += [x.strip() for x in s[len("input"):].split(",")]
        elif head == "output":
            outputs += [x.strip() for x in s[len("output"):].split(",")]
        elif head in GATES:
            args = re.search(r"\((.*)\)", s).group(1)
            pins = [x.strip() for x in args.split(",")]
            lines.append(f"{pins[0]} = {GATES[head]}({', '.join(pins[1:])})")
        elif head == "assign":
            lhs, rhs = [x.strip() for x in s[len("assign"):].split("=")]
            if rhs in ("1'b0", "1'b1"):
                gate = "XOR" if rhs == "1'b0" else "XNOR"
                lines.append(f"{lhs} = {gate}({inputs[0]}, {inputs[0]})")
            else:
                lines.append(f"{lhs} = BUFF({rhs})")
    with open(out, "w") as f:
        name = path.rsplit("/", 1)[-1].split(".")[0]
        f.write(f"# {name}\n")
        f.write(f"# {len(inputs)} inputs, {len(outputs)} outputs, {len(lines)} gates\n\n")
        for i in inputs:
            f.write(f"INPUT({i})\n")
        f.write("\n")
        for o in outputs:
            f.write(f"OUTPUT({o})\n")
        f.write("\n")
        for l in lines:
            f.write(l + "\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
