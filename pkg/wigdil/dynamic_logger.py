import os
import sys
import shutil
import logging
import warnings

from datetime import datetime

from wigdil import (
    _logging_level,
    _warning,
    WigDilWarning,
    WigDilError
)

warnings.showwarning = _warning

lvl = _logging_level

## notes:
## - each group is a Logger with its own set of handlers, so one call can write
##   a header to stderr and the log file while another writes args to the file only
## - handlers are shared between groups; levels can be set per handler and per group

class InvalidName(WigDilError): pass

class DuplicateName(InvalidName): pass

class UnknownReferenceWarning(WigDilWarning): pass

## handler functions
def file_in_use(path):
    return os.path.exists(path) and os.stat(path).st_size > 0

def append_time(path):
    directory, basename = os.path.split(path)
    stem, dot, suffix = basename.rpartition('.')
    if not dot: stem, suffix = basename, ''
    new_basename = f"{stem}_{int(datetime.utcnow().timestamp())}" + (f".{suffix}" if dot else '')
    return os.path.join(directory, new_basename)

class CustomFormatter(logging.Formatter):

    def __init__(self, fmt = None, fmt_msg = None, datefmt = None, style = '%'):
        super().__init__(fmt = fmt, datefmt = datefmt, style = style)
        self._fmt_msg = (lambda x: x) if fmt_msg is None else fmt_msg

    def format(self, record):
        record.msg = self._fmt_msg(record.msg)
        return super().format(record)

## handle filename changes
class DynamicFileHandler(logging.FileHandler):

    def __init__(self, filename, check_path = True):
        logging.FileHandler.__init__(self, filename, delay = True)
        if check_path: self._check_path()

    ## if file already exists, append unix time (seconds) to new logfile name
    def _check_path(self):
        if file_in_use(self.baseFilename):
            self.close()
            self.baseFilename = append_time(self.baseFilename)
        return

    ## moves log file that has been written to new location
    def update_filename(self, filename, check_path = True):
        p_old = self.baseFilename
        self.close()
        self.baseFilename = os.path.abspath(filename)
        if check_path and p_old != self.baseFilename: self._check_path()
        if os.path.exists(p_old) and p_old != self.baseFilename: shutil.move(p_old, self.baseFilename)
        return

class PublicLogger(logging.Logger):
    """
    Logger with named handlers and a default level, so that it can be called directly.

    >>> group("message")       ## logs at default level
    >>> group.warning("message")
    """

    def __init__(self, name, level = lvl, default_log_level = logging.INFO, format_msg = lambda x: x):
        logging.Logger.__init__(self, name, level = level)
        self.propagate = False
        self._named_handlers = {}
        self._default_log_level = default_log_level
        self._format_msg = format_msg

    @property
    def handler_names(self): return list(self._named_handlers.keys())

    def add_named_handler(self, handler, handler_name):
        if handler_name not in self._named_handlers:
            self._named_handlers[handler_name] = handler
            self.addHandler(handler)
        return

    def _log(self, level, msg, args, **kwargs):
        super()._log(level, self._format_msg(msg), args, **kwargs)

    def __call__(self, msg, *args, **kwargs):
        if self.isEnabledFor(self._default_log_level):
            self._log(self._default_log_level, msg, args, **kwargs)

class GroupLogger():
    """
    Collection of named formats, handlers and groups. Groups are PublicLogger
    objects reachable as attributes (e.g. GroupLogger.header("Run")).

    File handlers are only created once a filename is set; groups that list a
    file handler before then simply skip it.
    """

    def __init__(self, name = "wigdil", filename = None, level = lvl, default_log_level = logging.INFO,
                 stream = sys.stderr):
        self._name = name
        self._level = level
        self._default_log_level = default_log_level
        self._stream = stream
        self._formats = {}
        self._handlers = {}
        self._file_handler_specs = {}
        self._groups = {}
        self._group_handlers = {}
        self._filename = None
        if filename is not None: self.update_filename(filename)

    def __getattr__(self, name):
        groups = self.__dict__.get("_groups", {})
        if name in groups:
            return groups[name]
        raise AttributeError(name)

    @property
    def filename(self): return self._filename
    @property
    def group_names(self): return list(self._groups.keys())
    @property
    def handler_names(self): return list(self._handlers.keys())
    @property
    def level(self): return self._level

    def add_format(self, name, format, format_msg = None, replace = False):
        if name in self._formats and not replace:
            raise DuplicateName(f"'{name}' is an existing format.")
        self._formats[name] = (format, format_msg)
        return

    def _make_formatter(self, format):
        fmt, fmt_msg = self._formats.get(format, (format, None))
        return CustomFormatter(fmt, fmt_msg = fmt_msg)

    def _add_handler(self, name, handler, format, level = None):
        if name in self._handlers:
            raise DuplicateName(f"'{name}' is an existing handler.")
        handler.setFormatter(self._make_formatter(format))
        if level is not None: handler.setLevel(level)
        self._handlers[name] = handler
        return

    def add_stream_handler(self, name, format = "%(asctime)s %(message)s", level = None):
        self._add_handler(name, logging.StreamHandler(self._stream), format, level = level)
        return

    def add_file_handler(self, name, format = "%(asctime)s %(message)s", level = None):
        self._file_handler_specs[name] = (format, level)
        if self._filename is not None:
            self._add_handler(name, DynamicFileHandler(self._filename, check_path = False), format, level = level)
        return

    def add_group(self, name, *handlers, level = None, default_log_level = None, format_msg = lambda x: x):
        """
        Positional 'handlers' are names of handlers already added (or file handlers yet to be opened).
        """
        if name in self._groups:
            raise DuplicateName(f"'{name}' is an existing group.")
        group = PublicLogger(f"{self._name}.{name}", level = self._level if level is None else level,
                             default_log_level = (self._default_log_level if default_log_level is None
                                                  else default_log_level),
                             format_msg = format_msg)
        self._groups[name] = group
        self._group_handlers[name] = list(handlers)
        for handler_name in handlers:
            if handler_name in self._handlers:
                group.add_named_handler(self._handlers[handler_name], handler_name)
            elif handler_name not in self._file_handler_specs:
                warnings.warn(f"'{handler_name}' is not an existing handler. Ignoring.", UnknownReferenceWarning)
        return group

    def set_stream_level(self, level):
        for handler in self._handlers.values():
            if not isinstance(handler, logging.FileHandler):
                handler.setLevel(level)
        return

    def update_filename(self, filename, check_path = True):
        """
        Open (or move) the log file and attach file handlers to their groups.
        """
        file_handlers = [h for h in self._handlers.values() if isinstance(h, DynamicFileHandler)]
        if file_handlers:
            file_handlers[0].update_filename(filename, check_path = check_path)
            for handler in file_handlers[1:]:
                handler.update_filename(file_handlers[0].baseFilename, check_path = False)
            self._filename = file_handlers[0].baseFilename
            return
        self._filename = os.path.abspath(filename)
        if check_path and file_in_use(self._filename):
            self._filename = append_time(self._filename)
        for name, (format, level) in self._file_handler_specs.items():
            self._add_handler(name, DynamicFileHandler(self._filename, check_path = False), format, level = level)
        for group, handler_names in self._group_handlers.items():
            for handler_name in handler_names:
                if handler_name in self._file_handler_specs:
                    self._groups[group].add_named_handler(self._handlers[handler_name], handler_name)
        return

    def close(self):
        for handler in self._handlers.values():
            handler.close()
        return
