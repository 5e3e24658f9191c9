from gerbes.gerbe import enumerate_discrete_torsion
from gerbes.tools import GerbesCommand, format_values


class Command(GerbesCommand):
    help = "Classes of discrete torsion of a group, one normalized representative each"

    def add_arguments(self, parser):
        parser.add_argument("group")
        super().add_arguments(parser)

    def report(self, workspace, **options):
        group = workspace.group(options["group"])
        classes = enumerate_discrete_torsion(group)
        representatives = []
        moduli = []
        for k, theta in enumerate(classes):
            reduction = theta.torsion_class()
            moduli = list(reduction.moduli)
            representatives.append(
                {
                    "class": k,
                    "coordinates": list(reduction.torsion),
                    "values": theta.to_mapping(),
                }
            )
        return {
            "group": options["group"],
            "order": group.order,
            "classes": len(classes),
            "moduli": moduli,
            "representatives": representatives,
        }

    def table(self, report):
        return (
            ("class", "coordinates", "values"),
            [
                (
                    r["class"],
                    ",".join(map(str, r["coordinates"])) or "-",
                    format_values(r["values"]),
                )
                for r in report["representatives"]
            ],
        )
