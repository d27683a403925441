from gradedkit._internal.commands.base import BaseCommand, CommandOptions
from gradedkit._internal.commands.ce import CECommand
from gradedkit._internal.commands.convert import ConvertCommand
from gradedkit._internal.commands.dirac import DiracCommand
from gradedkit._internal.commands.normalize import NormalizeCommand
from gradedkit._internal.commands.transfer import TransferCommand
from gradedkit._internal.commands.verify import VerifyCommand
from gradedkit._internal.dsl.document import SpecDocument
from gradedkit._internal.report import Report

COMMANDS = ("verify", "ce", "normalize", "convert", "dirac", "transfer")

_command_cache = {}


def get_command(command_name: str) -> BaseCommand:
    if command_name not in _command_cache:
        if command_name == "verify":
            _command_cache[command_name] = VerifyCommand()
        elif command_name == "ce":
            _command_cache[command_name] = CECommand()
        elif command_name == "normalize":
            _command_cache[command_name] = NormalizeCommand()
        elif command_name == "convert":
            _command_cache[command_name] = ConvertCommand()
        elif command_name == "dirac":
            _command_cache[command_name] = DiracCommand()
        elif command_name == "transfer":
            _command_cache[command_name] = TransferCommand()
        else:
            raise ValueError(f"Invalid command name: {command_name}")

    return _command_cache[command_name]


def run_command(
    command_name: str,
    doc: SpecDocument,
    companion: SpecDocument | None = None,
    options: CommandOptions | None = None,
) -> Report:
    """Run a command on a document, and on a companion document for the binary commands"""
    return get_command(command_name).run(doc, companion, options)


__all__ = ["BaseCommand", "CommandOptions", "COMMANDS", "get_command", "run_command"]
