from gerbes.exceptions import NotACocycle
from gerbes.gerbe import DiscreteTorsion, verify_cocycle
from gerbes.tools import GerbesCommand


class Command(GerbesCommand):
    help = "Checks the cocycle condition of a named cocycle"

    def add_arguments(self, parser):
        parser.add_argument("cocycle")
        super().add_arguments(parser)

    def report(self, workspace, **options):
        name = options["cocycle"]
        # group cocycles are checked while the workspace resolves them
        cocycle = workspace.cocycle(name)
        if isinstance(cocycle, DiscreteTorsion):
            return {"cocycle": name, "degree": 2, "valid": True}
        verdict = verify_cocycle(cocycle)
        if not verdict:
            raise NotACocycle(
                "%s is not a cocycle, coboundary %s on %s" % (name, verdict.value, verdict.cell),
                params={"cocycle": name, **verdict.to_json()["certificate"]},
            )
        return {"cocycle": name, "degree": cocycle.degree, "valid": True}

    def table(self, report):
        return (("cocycle", "degree", "valid"), [(report["cocycle"], report["degree"], "yes")])
