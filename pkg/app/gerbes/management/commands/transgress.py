from gerbes.exceptions import InvariantError
from gerbes.gerbe import enumerate_discrete_torsion, transgress, verify_inner_local_system
from gerbes.tools import GerbesCommand


class Command(GerbesCommand):
    help = "Inner local system of a discrete torsion class on the inertia of [*/G]"

    def add_arguments(self, parser):
        parser.add_argument("group")
        parser.add_argument("class_index", type=int)
        super().add_arguments(parser)

    def report(self, workspace, **options):
        group = workspace.group(options["group"])
        index = options["class_index"]
        classes = enumerate_discrete_torsion(group)
        if not 0 <= index < len(classes):
            raise InvariantError(
                "Class index %d is outside 0..%d" % (index, len(classes) - 1),
                code="class-index",
                params={"index": index, "classes": len(classes)},
            )
        system = transgress(classes[index])
        sectors = []
        for sector, character in system.sector_characters():
            sectors.append(
                {
                    "sector": sector.index,
                    "element": group.labels[sector.representative],
                    "centralizer_order": sector.isotropy_order,
                    "identity_sector": sector.is_identity,
                    "character": {group.labels[h]: str(v) for h, v in character},
                }
            )
        return {
            "group": options["group"],
            "class": index,
            "sectors": sectors,
            "verdict": verify_inner_local_system(system).to_json(),
        }

    def table(self, report):
        return (
            ("sector", "element", "character"),
            [
                (
                    s["sector"],
                    s["element"],
                    " ".join("%s=%s" % item for item in s["character"].items()),
                )
                for s in report["sectors"]
            ],
        )
