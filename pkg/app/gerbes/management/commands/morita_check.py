from gerbes.groupoid import is_weak_equivalence
from gerbes.nervecohomology import orbifold_cohomology_table
from gerbes.tools import GerbesCommand


class Command(GerbesCommand):
    help = "Decides whether a morphism of translation groupoids is a weak equivalence"
    coefficients_option = True
    degree_option = True

    def add_arguments(self, parser):
        parser.add_argument("morphism")
        super().add_arguments(parser)

    def report(self, workspace, **options):
        name = options["morphism"]
        entry = workspace.morphism_entry(name)
        verdict = is_weak_equivalence(workspace.morphism(name))
        report = {
            "morphism": name,
            "source": entry.source,
            "target": entry.target,
            "verdict": verdict.to_json(),
        }
        max_degree = options.get("max_degree")
        if max_degree is not None:
            coefficients = options["coefficients"]
            source = orbifold_cohomology_table(
                workspace.action(entry.source), coefficients, max_degree
            )
            target = orbifold_cohomology_table(
                workspace.action(entry.target), coefficients, max_degree
            )
            report["cohomology"] = [
                {
                    "degree": k,
                    "source": str(a),
                    "target": str(b),
                    "equal": a == b,
                }
                for (k, a), (_, b) in zip(source, target)
            ]
        return report

    def table(self, report):
        rows = [("weak equivalence", "yes" if report["verdict"]["equivalent"] else "no")]
        for r in report.get("cohomology", ()):
            rows.append(("H^%d" % r["degree"], "%s | %s" % (r["source"], r["target"])))
        return (("check", "result"), rows)
