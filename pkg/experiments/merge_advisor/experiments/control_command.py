# Typer command-line application

from contextlib import contextmanager
from os import environ

import typer
from pydantic import ValidationError
from typer import Context, Option, Typer
from typer.core import TyperGroup
from typer.models import TyperInfo

from merge_advisor.utils import MergeAdvisorError, get_logger

from .core import Application

log = get_logger(__name__)

CONFIG_ERROR = 2
FAILURE = 1


class OrderCommands(TyperGroup):
    def list_commands(self, ctx: Context):
        """Return list of commands in the order of appearance."""
        return list(self.commands)


class ControlCommand(Typer):
    name: str
    app: Application

    def __init__(self, app: Application, **kwargs):
        kwargs.setdefault("add_completion", False)
        kwargs.setdefault("no_args_is_help", True)
        kwargs.setdefault("cls", OrderCommands)
        kwargs.setdefault("name", app.command_name)
        super().__init__(**kwargs)
        self.app = app
        self.name = app.command_name

        verbose_envvar = self.app.envvar("verbose")

        def callback(
            ctx: Context,
            verbose: bool = Option(False, "--verbose", envvar=verbose_envvar),
        ):
            ctx.obj = self.app
            # Nested invocations pick up the verbosity from the environment.
            if verbose:
                environ[verbose_envvar] = "1"
            self.app.setup_logs(verbose=verbose)

        callback.__doc__ = f"""{self.app.name} command-line interface"""

        self.registered_callback = TyperInfo(callback=callback)

    def add_commands(self, *commands, rich_help_panel=None):
        for cmd in commands:
            if cmd.__doc__ is not None:
                cmd.__doc__ = self.app.replace_names(cmd.__doc__)
            name = cmd.__name__.replace("_", "-")
            self.command(name=name, rich_help_panel=rich_help_panel)(cmd)


@contextmanager
def handle_errors(app: Application):
    """Report application errors on the console and exit with a status code."""
    try:
        yield
    except ValidationError as err:
        app.error(f"invalid configuration\n{err}")
        raise typer.Exit(CONFIG_ERROR)
    except FileNotFoundError as err:
        app.error(str(err))
        raise typer.Exit(CONFIG_ERROR)
    except MergeAdvisorError as err:
        log.debug("Command failed", exc_info=err)
        app.error(str(err))
        raise typer.Exit(FAILURE)
