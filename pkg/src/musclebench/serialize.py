"""Canonical text serialization shared by traces, sweeps and configs."""


def fmt_float(x) -> str:
    """Floats are always written with 9 significant digits."""
    x = float(x)
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return f"{x:.9g}"


def write_csv(path, header, rows):
    """Write rows of cells: floats via fmt_float, ints and strings verbatim."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = []
            for v in row:
                if isinstance(v, (bool,)):
                    cells.append(str(int(v)))
                elif isinstance(v, (int,)):
                    cells.append(str(v))
                elif isinstance(v, str):
                    cells.append(v)
                else:
                    cells.append(fmt_float(v))
            fh.write(",".join(cells) + "\n")
