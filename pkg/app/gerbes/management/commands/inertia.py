from gerbes.groupoid import point_action, twisted_sectors
from gerbes.tools import GerbesCommand


class Command(GerbesCommand):
    help = "Twisted sectors of an action, or of [*/G] for a group"

    def add_arguments(self, parser):
        parser.add_argument("name", help="action or group in the workspace")
        super().add_arguments(parser)

    def report(self, workspace, **options):
        name = options["name"]
        if workspace.kind_of(name) == "group":
            action = point_action(workspace.group(name))
        else:
            action = workspace.action(name)
        sectors = twisted_sectors(action)
        return {
            "object": name,
            "sectors": len(sectors),
            "details": [sector.to_json() for sector in sectors],
        }

    def table(self, report):
        return (
            ("sector", "element", "objects", "arrows", "isotropy_order", "identity_sector"),
            [
                (
                    s["sector"],
                    s["element"],
                    s["objects"],
                    s["arrows"],
                    s["isotropy_order"],
                    "yes" if s["identity_sector"] else "no",
                )
                for s in report["details"]
            ],
        )
