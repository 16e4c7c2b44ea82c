import sys


def _colour() -> bool:
    return sys.stderr.isatty()


class Logger:
    enable_debug = False

    @staticmethod
    def _print(code: str, *pos, **args) -> None:  # type: ignore
        args.setdefault("file", sys.stderr)
        if code and _colour():
            print(code, end="", file=args["file"])
            print(*pos, **args)
            print("\033[0m", end="", file=args["file"])
        else:
            print(*pos, **args)

    @staticmethod
    def info(*pos, **args) -> None:  # type: ignore
        Logger._print("", *pos, **args)

    @staticmethod
    def debug(*pos, **args) -> None:  # type: ignore
        if Logger.enable_debug:
            # print in blue
            Logger._print("\033[94m", *pos, **args)

    @staticmethod
    def warn(*pos, **args) -> None:  # type: ignore
        Logger._print("\033[93m", *pos, **args)

    @staticmethod
    def error(*pos, **args) -> None:  # type: ignore
        Logger._print("\033[91m", *pos, **args)

    @staticmethod
    def fatal(*pos, code: int = 1, **args) -> None:  # type: ignore
        Logger._print("\033[91m", *pos, **args)
        raise SystemExit(code)
