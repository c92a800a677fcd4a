import sys

## functions for displaying messages (stderr; stdout is reserved for data)

def print_indent(msg, lvl: int = 0, c: str = ' ', overwrite: bool = False, file = None):
    '''
    Print with indentation
    '''
    file = sys.stderr if file is None else file
    msg = (c * lvl) + str(msg)
    if overwrite:
        print(msg, end = '\r', file = file)
    else:
        print(msg, file = file)
    return

def make_print_preindent(initial_lvl: int = 0):
    '''
    Generate print_indent function w/ predefined initial indent level
    '''
    def print_preindent(msg, lvl: int = 0, **kwargs):
        return print_indent(msg, initial_lvl + lvl, **kwargs)
    return print_preindent

def format_deviation_table(rows, file = None):
    '''
    Print (name, value, tolerance, status) rows as an aligned table.
    '''
    file = sys.stdout if file is None else file
    width = max((len(row[0]) for row in rows), default = 0)
    for name, value, tol, status in rows:
        value_str = "n/a" if value is None else f"{value:.3e}"
        tol_str = '' if tol is None else f"{tol:.0e}"
        print(f"{name:<{width}}  {value_str:>10}  {tol_str:>6}  {status}", file = file)
    return
