import logging

from wigdil.dynamic_logger import GroupLogger, lvl

class WigDilLogger(GroupLogger):
    """
    Console (stderr) and optional file logging for the CLI.

    >>> logger = WigDilLogger()
    >>> logger.header("run")                ## writes to stderr and, once set, the log file
    >>> logger.args(["raw", sys.argv])      ## writes only to the log file
    >>> logger.update_filename("run.log")
    """

    def __init__(self, filename = None, level = lvl, default_log_level = logging.INFO):

        GroupLogger.__init__(self, name = "wigdil", filename = None, level = level,
                             default_log_level = default_log_level)

        ## formats
        self.add_format("header", "-- %(message)s --")
        self.add_format("plain", "%(message)s")
        self.add_format("full", "%(asctime)s - %(name)s - %(levelname)s:%(message)s")
        ## generic handlers (set level to most permissive)
        self.add_stream_handler("splain", format = "plain", level = logging.DEBUG)
        self.add_file_handler("fplain", format = "plain", level = logging.DEBUG)
        self.add_stream_handler("sfull", format = "full", level = logging.DEBUG)
        self.add_file_handler("ffull", format = "full", level = logging.DEBUG)
        ## generic groups
        self.add_group("plain", "splain", "fplain")
        self.add_group("fplain", "fplain")
        ## wrap preset log calls
        self.add_group("error", "sfull", "ffull", default_log_level = logging.ERROR, level = logging.ERROR)
        self.add_group("warning", "sfull", "ffull", default_log_level = logging.WARNING)
        self.add_group("info", "sfull", "ffull", default_log_level = logging.INFO)
        self.add_group("debug", "sfull", "ffull", default_log_level = logging.DEBUG, level = logging.DEBUG)
        ## args
        self.add_group("args", "fplain",
                       format_msg = lambda type_args: (f"(({type_args[0]} args))\n{' '.join(map(str, type_args[1]))}"
                                                       if isinstance(type_args, (list, tuple)) else type_args))
        ## header
        self.add_stream_handler("sheader", format = "header", level = logging.DEBUG)
        self.add_file_handler("fheader", format = "header", level = logging.DEBUG)
        self.add_group("header", "sheader", "fheader")

        ## library modules log through the standard hierarchy under 'wigdil'
        library = logging.getLogger("wigdil")
        library.setLevel(level)
        if not library.handlers:
            library.addHandler(self._handlers["sfull"])

        if filename is not None: self.update_filename(filename)

    def quiet(self, quiet: bool = True):
        self.set_stream_level(logging.WARNING if quiet else logging.DEBUG)
        return

    def update_filename(self, filename, check_path = True):
        super().update_filename(filename, check_path = check_path)
        library = logging.getLogger("wigdil")
        if "ffull" in self._handlers and self._handlers["ffull"] not in library.handlers:
            library.addHandler(self._handlers["ffull"])
        return
