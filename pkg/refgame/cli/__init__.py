#!/usr/bin/env python

# SPDX-FileCopyrightText: 2025 refgame developers
#
# SPDX-License-Identifier: GPL-3.0-or-later
"""Command line of the experiments.

Exit codes: 0 when every check passed, 2 when a check failed, 1 on errors
(invalid configuration, numerical failure, unwritable output).
"""

from __future__ import annotations

from cleo import Application as BaseApplication
from clikit.api.args.format.argument import Argument
from clikit.api.args.format.option import Option
from clikit.api.event import PRE_HANDLE, PRE_RESOLVE
from clikit.api.io import Input, Output
from clikit.api.io.flags import DEBUG, VERBOSE, VERY_VERBOSE
from clikit.api.io.input_stream import InputStream
from clikit.api.io.output_stream import OutputStream
from clikit.config import DefaultApplicationConfig
from clikit.formatter import AnsiFormatter, PlainFormatter
from clikit.handler.help import HelpTextHandler
from clikit.io.console_io import ConsoleIO
from clikit.io.input_stream import StandardInputStream
from clikit.io.output_stream import ErrorOutputStream, StandardOutputStream
from clikit.resolver.help_resolver import HelpResolver

from refgame import __version__
from refgame.cli.command.cross_validate import CrossValidateCommand
from refgame.cli.command.dpp import DPPCommand
from refgame.cli.command.gbsde import SolveGBSDECommand
from refgame.cli.command.list import ListCommand
from refgame.cli.command.pde import SolvePDECommand
from refgame.cli.command.report import ReportCommand
from refgame.cli.command.simulate import SimulateCommand
from refgame.cli.command.timechange import TimeChangeCommand
from refgame.cli.command.validate import ValidateCommand
from refgame.log import configure_logger

LOG_FORMAT = "<info>%(asctime)s</info> | <c1>%(levelname)-7s</c1> | <c2>%(name)s</c2> | %(message)s"

COMMANDS = (
    ValidateCommand,
    SimulateCommand,
    SolveGBSDECommand,
    TimeChangeCommand,
    SolvePDECommand,
    DPPCommand,
    CrossValidateCommand,
    ReportCommand,
    ListCommand,
)

# most verbose first: (option token, io verbosity, log level)
VERBOSITY = (
    ("-vvv", DEBUG, "debug"),
    ("-vv", VERY_VERBOSE, "info"),
    ("-v", VERBOSE, "warning"),
)


class Application(BaseApplication):

    def __init__(self):
        super().__init__(config=ApplicationConfig())
        for command_class in COMMANDS:
            self.add(command_class())


class ApplicationConfig(DefaultApplicationConfig):

    def __init__(self):
        super().__init__(name="refgame", version=__version__)

    def configure(self):
        self.set_io_factory(self.create_io)
        self.add_event_listener(PRE_RESOLVE, self.resolve_help_command)
        self.add_event_listener(PRE_HANDLE, self.print_version)

        self.add_option("help", "h", Option.NO_VALUE, "Display this help message")
        self.add_option("verbose", "v", Option.NO_VALUE,
                        "Log more: '-v' warnings, '-vv' progress and results, '-vvv' numerical details")
        self.add_option("version", None, Option.NO_VALUE, "Display this application version")
        self.add_option("no-ansi", None, Option.NO_VALUE, "Disable ANSI output")
        self.add_option("config", "c", Option.REQUIRED_VALUE, "Path to the experiment file (JSON or YAML)")

        with self.command("help") as c:
            c.default()
            c.set_description("Display the manual of a command")
            c.add_argument("command", Argument.OPTIONAL | Argument.MULTI_VALUED, "The command name")
            c.set_handler(HelpTextHandler(HelpResolver()))

    def create_io(self,
                  application,
                  args,
                  input_stream: InputStream = None,
                  output_stream: OutputStream = None,
                  error_stream: OutputStream = None) -> ConsoleIO:
        # pylint: disable=too-many-arguments,too-many-positional-arguments
        output_stream = output_stream or StandardOutputStream()
        error_stream = error_stream or ErrorOutputStream()
        styles = application.config.style_set
        plain_only = args.has_option_token("--no-ansi")

        def output(stream: OutputStream) -> Output:
            ansi = stream.supports_ansi() and not plain_only
            return Output(stream, AnsiFormatter(styles) if ansi else PlainFormatter(styles))

        io = self.io_class(Input(input_stream or StandardInputStream()), output(output_stream), output(error_stream))

        # errors only, unless asked for more
        log_level = "error"
        for token, verbosity, level in VERBOSITY:
            if args.has_option_token(token):
                io.set_verbosity(verbosity)
                log_level = level
                break
        configure_logger(log_level, LOG_FORMAT, io.output, io.error_output)
        return io


def main():
    Application().run()


if __name__ == '__main__':
    main()
