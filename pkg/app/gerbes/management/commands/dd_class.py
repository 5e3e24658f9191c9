from gerbes.exceptions import InvariantError
from gerbes.gerbe import (
    DiscreteTorsion,
    FlatLineBundle,
    GerbeCocycle,
    chern_class,
    dd_class,
    gerbe_class,
    line_bundle_class,
    torsion_to_gerbe,
)
from gerbes.groupoid import point_action
from gerbes.tools import GerbesCommand


class Command(GerbesCommand):
    help = "Dixmier-Douady class of a gerbe, or the Chern class of a flat line bundle"

    def add_arguments(self, parser):
        parser.add_argument("cocycle")
        super().add_arguments(parser)

    def report(self, workspace, **options):
        name = options["cocycle"]
        cocycle = workspace.cocycle(name)
        if isinstance(cocycle, DiscreteTorsion):
            cocycle = torsion_to_gerbe(cocycle, point_action(cocycle.group))
        if isinstance(cocycle, GerbeCocycle):
            kind, integral, flat = "dixmier-douady", dd_class(cocycle), gerbe_class(cocycle)
        elif isinstance(cocycle, FlatLineBundle):
            kind, integral, flat = "chern", chern_class(cocycle), line_bundle_class(cocycle)
        else:
            raise InvariantError(
                "Cocycle %s has degree %d, expected 1 or 2" % (name, cocycle.degree),
                code="cochain-shape",
                params={"cocycle": name, "degree": cocycle.degree},
            )
        return {
            "cocycle": name,
            "kind": kind,
            "degree": cocycle.degree + 1,
            "class": integral.to_json(),
            "flat_class": flat.to_json(),
            "trivial": integral.is_zero(),
        }

    def table(self, report):
        data = report["class"]
        return (
            ("cocycle", "kind", "degree", "coordinates", "moduli"),
            [
                (
                    report["cocycle"],
                    report["kind"],
                    report["degree"],
                    ",".join(map(str, data["coordinates"])) or "-",
                    ",".join(map(str, data["moduli"])) or "-",
                )
            ],
        )
