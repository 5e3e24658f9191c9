import json
import logging

from django.core.management.base import BaseCommand, CommandError

from gerbes.exceptions import BoundExceeded, InvariantError
from gerbes.nervecohomology import COEFFICIENTS, INTEGERS
from gerbes.workspace import load_workspace

logger = logging.getLogger("gerbes")

JSON = "json"
TABLE = "table"


def presentation_record(degree, presentation):
    """JSON record of one cohomology group

    :param  degree:       the degree
    :type   degree:       int
    :param  presentation: the group
    :type   presentation: AbelianGroupPresentation
    :rtype: dict
    """
    return presentation.to_json(degree)


def parse_truncation(text):
    """Reads ``"p,q"`` into a pair of ints

    :rtype: tuple
    """
    try:
        p, q = (int(x) for x in text.split(","))
    except (AttributeError, ValueError):
        raise InvariantError(
            "Truncation %r is not of the form p,q" % text,
            code="truncation-format",
            params={"truncation": text},
        )
    return p, q


def dumps(report):
    return json.dumps(report, sort_keys=True, indent=2)


def format_table(headers, rows):
    """Left aligned plain text table"""
    cells = [[str(h) for h in headers]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def format_values(values):
    return " ".join("%s=%s" % (k, v) for k, v in values.items()) or "0"


def error_payload(exception):
    return dumps(exception.as_dict())


class GerbesCommand(BaseCommand):
    """Loads the workspace, runs ``report`` and prints it as JSON or as a table

    Validation errors exit with 1 and bound refusals with 2, after writing
    the error object to stderr; nothing reaches stdout in that case.
    """

    coefficients_option = False
    degree_option = False
    truncation_option = False

    def add_arguments(self, parser):
        parser.add_argument("--workspace", default=None, help="workspace file or 'builtin'")
        parser.add_argument("--output", choices=(JSON, TABLE), default=JSON)
        if self.coefficients_option:
            parser.add_argument("--coefficients", choices=COEFFICIENTS, default=INTEGERS)
        if self.degree_option:
            parser.add_argument("--max-degree", type=int, default=None)
        if self.truncation_option:
            parser.add_argument("--truncation", default=None, help="p_max,q_max")

    def report(self, workspace, **options):
        raise NotImplementedError

    def table(self, report):
        """(headers, rows) for ``--output table``"""
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            workspace = load_workspace(options.pop("workspace", None))
            report = self.report(workspace, **options)
        except InvariantError as e:
            self.stderr.write(error_payload(e))
            raise CommandError(e.message, returncode=1)
        except BoundExceeded as e:
            self.stderr.write(error_payload(e))
            raise CommandError(str(e), returncode=2)

        if options.get("output") == TABLE:
            self.stdout.write(format_table(*self.table(report)))
        else:
            self.stdout.write(dumps(report))
        logger.info("%s finished", self.__module__.rsplit(".", 1)[-1])
