import os

from wigdil.constants import THREADS_ENV
from wigdil.display import make_print_preindent

def resolve_threads(threads: int = None, env = os.environ) -> int:
    '''
    Worker count: explicit value if given, else $WIGNER_DILATION_THREADS;
    0 or unset means os.cpu_count().
    '''
    if threads is None:
        raw = env.get(THREADS_ENV, '').strip()
        try:
            threads = int(raw) if raw else 0
        except ValueError:
            threads = 0
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads

def make_local_print(quiet, printf = print):
    def local_print(*args, **kwargs):
        if not quiet: printf(*args, **kwargs)
    return local_print

## display for imap
from multiprocess import Pool
def imap_ordered(f, args, threads = 1, msg = lambda curr, last: f"{curr}/{last} done.",
                 lvl = 0, quiet = True, chunksize = 8):
    '''
    Apply f to every element of args, returning results in input order.
    Uses a multiprocess Pool when threads > 1, which (unlike multiprocessing)
    pickles closures and lambdas.
    '''
    args = list(args)
    total = len(args)
    printi = make_local_print(quiet = quiet, printf = make_print_preindent(lvl + 1))
    if threads <= 1 or total <= 1:
        output = []
        for i, arg in enumerate(args, 1):
            output.append(f(arg))
            printi(msg(i, total), overwrite = i < total)
        return output
    output = []
    with Pool(min(threads, total)) as pool:
        for i, result in enumerate(pool.imap(f, args, chunksize = chunksize), 1):
            output.append(result)
            printi(msg(i, total), overwrite = i < total)
    return output
