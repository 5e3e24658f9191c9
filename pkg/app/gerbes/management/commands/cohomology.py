from gerbes.nervecohomology import group_cohomology_table, orbifold_cohomology_table
from gerbes.tools import GerbesCommand, parse_truncation, presentation_record


class Command(GerbesCommand):
    help = "Cohomology of a group (bar complex) or of an action (double complex)"
    coefficients_option = True
    degree_option = True
    truncation_option = True

    def add_arguments(self, parser):
        parser.add_argument("name", help="group or action in the workspace")
        super().add_arguments(parser)

    def report(self, workspace, **options):
        name = options["name"]
        coefficients = options["coefficients"]
        max_degree = options["max_degree"]
        max_degree = 3 if max_degree is None else max_degree
        if workspace.kind_of(name) == "group":
            table = group_cohomology_table(workspace.group(name), coefficients, max_degree)
        else:
            truncation = options.get("truncation")
            p_max, q_max = parse_truncation(truncation) if truncation else (None, None)
            table = orbifold_cohomology_table(
                workspace.action(name), coefficients, max_degree, p_max, q_max
            )
        return [presentation_record(k, presentation) for k, presentation in table]

    def table(self, report):
        return (
            ("degree", "free_rank", "torsion", "divisible"),
            [
                (r["degree"], r["free_rank"], ",".join(map(str, r["torsion"])) or "-", r["divisible"])
                for r in report
            ],
        )
