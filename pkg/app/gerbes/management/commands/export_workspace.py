import logging

from django.core.management.base import BaseCommand

from gerbes.workspace import builtin_workspace

logger = logging.getLogger("gerbes")


class Command(BaseCommand):
    help = "Writes the built-in workspace document to stdout or to a file"

    def add_arguments(self, parser):
        parser.add_argument("--file", default=None)

    def handle(self, *args, **kwargs):
        text = builtin_workspace().dumps()
        if kwargs["file"]:
            with open(kwargs["file"], "w") as f:
                f.write(text)
            logger.info("Workspace written to %s" % kwargs["file"])
        else:
            self.stdout.write(text, ending="")
