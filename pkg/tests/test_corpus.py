"""The embedded corpus: acceptance, computation and measurements."""

import json
import shutil

import pytest

from cedille_kernel.checker import CheckOptions, TypeCheckError
from cedille_kernel.delta import DeltaVerdict, bohm_discriminate, delta_applicable
from cedille_kernel.modules import ModuleError, Workspace
from cedille_kernel.parser import parse_expr
from cedille_kernel.pure import IDENTITY, PApp, PLam, PVar, alpha_eq, pretty_pure
from cedille_kernel.reduce import Verdict, beta_eta_equal, normalize
from cedille_kernel.runner import ELIDED, complete_elided_proofs, load_manifest, observe, run_corpus
from cedille_kernel.syntax import Beta, erase


@pytest.fixture(scope="module")
def report(root):
    return run_corpus(root)


def test_every_file_as_expected(report):
    bad = [f"{f.file}: {f.outcome} {f.errors}" for f in report.files if not f.ok]
    assert report.ok, bad
    assert report.seconds < 60


def test_expected_rejections_name_their_error(report):
    files, _ = load_manifest()
    kinds = {f.file: f.error_kind for f in report.files}
    for cf in files:
        if cf.expect == "reject":
            assert kinds[cf.path.as_posix()] == cf.error


def test_report_is_deterministic(root, report):
    again = run_corpus(root)
    a = json.dumps(report.to_json(timing=False), sort_keys=True)
    b = json.dumps(again.to_json(timing=False), sort_keys=True)
    assert a == b
    assert report.lines(timing=False) == again.lines(timing=False)


def test_report_json_fields(report):
    data = report.to_json()
    assert {"ok", "files", "measurements", "overhead", "seconds"} <= set(data)
    for entry in data["files"]:
        assert {"file", "outcome", "expected", "errors", "warnings", "steps", "seconds"} <= set(entry)


def test_manifest_paths_exist(root):
    files, data = load_manifest(root)
    assert len({cf.path for cf in files}) == len(files)
    for cf in files:
        assert (root / cf.path).is_file()
        assert cf.tags


# -- completed bodies ------------------------------------------------------


def test_elided_bodies_are_written_and_checked(module):
    bodies = complete_elided_proofs()
    assert set(bodies) == set(ELIDED)
    for name, rel in ELIDED.items():
        mod = module(rel)
        assert name in mod.own
        assert not isinstance(bodies[name].body, Beta)


def test_anonymous_equations_all_pass(module):
    files, _ = load_manifest()
    anonymous = 0
    for cf in files:
        if cf.expect != "accept":
            continue
        mod = module(cf.path.as_posix())
        anonymous += sum(d.name == "_" for d in mod.defs)
    assert anonymous >= 9


def test_accepted_bodies_normalize(workspace, module):
    files, _ = load_manifest()
    for cf in files:
        if cf.expect != "accept":
            continue
        mod = module(cf.path.as_posix())
        for name, gid in mod.own.items():
            g = workspace.env.get(gid)
            if g.is_type:
                continue
            tr = normalize(erase(g.body), 100_000)
            assert not tr.fuel_exhausted, name


# -- computation ---------------------------------------------------------------

IDENTITIES = ["intrCast", "elimCast", "castRefl", "castTrans", "intrMono", "elimMono", "roll", "unroll"]


@pytest.mark.parametrize("name", IDENTITIES)
def test_coercions_erase_to_identity(workspace, module, name):
    mod = module("utils.ced")
    t = normalize(workspace.erased(mod, name, "raw")).result
    assert alpha_eq(t, IDENTITY), pretty_pure(t)


def test_pair_projections_compute(workspace, module):
    mod = module("utils.ced")
    for lhs, rhs in [("fst (intrPair a b)", "a"), ("snd (intrPair a b)", "b")]:
        assert beta_eta_equal(workspace.erased(mod, lhs), workspace.erased(mod, rhs)) is Verdict.EQUAL


def test_computation_rule(workspace, module):
    mod = module("nu/nu.ced")
    lhs = workspace.erased(mod, "outM (unfoldM coa x)")
    rhs = workspace.erased(mod, "coa inM (unfoldM coa) x")
    assert lhs.fv == rhs.fv == {"coa", "x"}
    assert beta_eta_equal(lhs, rhs) is Verdict.EQUAL


def test_lambek_one_direction(workspace, module):
    mod = module("nu/nu.ced")
    tr = normalize(workspace.erased(mod, "outM (inM xs)", "raw"))
    assert alpha_eq(tr.result, PVar("xs"))
    assert tr.steps == 13


def test_constructor_overhead_is_constant(report):
    assert report.overhead == {"1": 14, "5": 14, "10": 14}


def test_step_measurements(report):
    steps = {s.term: s for s in report.steps}
    assert steps["lambekFree"].steps == 13
    assert steps["peek1"].steps == steps["peek10"].steps
    assert not any(s.fuel_exhausted for s in report.steps)


def church(n):
    body = PVar("z")
    for _ in range(n):
        body = PApp(PVar("s"), body)
    return PLam("s", PLam("z", body))


def list_model(n=10):
    """The same stream programs, on the first n elements as a plain list."""
    nats = list(range(n))
    mapped = [k + 1 for k in nats]
    map_hd = [nats[0] + 1] + nats[1:]
    exch = []
    for i in range(0, n - 1, 2):
        exch += [nats[i + 1], nats[i]]
    return {"nats": nats, "mapSuccNats": mapped, "mapHdSuccNats": map_hd, "exchNats": exch}


@pytest.mark.parametrize("stream", ["nats", "mapSuccNats", "mapHdSuccNats", "exchNats"])
def test_stream_observations_match_list_model(workspace, module, stream):
    mod = module("examples/natstreams.ced")
    heads = observe(workspace, mod, stream, 5)
    expected = list_model()[stream][:5]
    assert [alpha_eq(h, church(k)) for h, k in zip(heads, expected)] == [True] * 5


def test_lambek_other_direction_fails(workspace, module):
    mod = module("nu/lambek.ced")
    t = normalize(workspace.erased(mod, "t")).result
    back = normalize(workspace.erased(mod, "inM (outM t)")).result
    assert alpha_eq(t, erase(parse_expr("λ f. f (λ x. x) (λ v. λ ch. λ x. ch x)")))
    assert alpha_eq(back, erase(parse_expr("λ g. g (λ f. f (λ x. x) (λ v. λ ch. λ x. ch x)) (λ v. λ ch. λ x. x)")))
    assert beta_eta_equal(back, t) is Verdict.DISTINCT
    assert delta_applicable(back, t) is DeltaVerdict.YES
    d = bohm_discriminate(back, t)
    assert alpha_eq(normalize(PApp(d.context, back)).result, erase(parse_expr("λ x. λ y. x")))
    assert alpha_eq(normalize(PApp(d.context, t)).result, erase(parse_expr("λ x. λ y. y")))


def test_strict_delta_rejects_lambek(root):
    ws = Workspace(CheckOptions(delta_mode="strict"), search=[root])
    with pytest.raises(TypeCheckError) as info:
        ws.load(root / "nu/lambek.ced")
    assert info.value.definition == "noLambek2"
    assert str(info.value.kind) == "delta-inapplicable"


# -- mutants -------------------------------------------------------------------


@pytest.fixture
def mutate(root, tmp_path):
    """Copy the corpus, apply a textual change to one file and check it."""

    def run(rel, old, new):
        copy = tmp_path / "corpus"
        shutil.copytree(root, copy)
        f = copy / rel
        text = f.read_text(encoding="utf-8")
        assert text.count(old) == 1, old
        f.write_text(text.replace(old, new), encoding="utf-8")
        Workspace(search=[copy]).load(f)

    return run


PROOFS = "examples/streamrelproofs.ced"

MUTANTS = [
    (PROOFS, "(ρ g - (refl -(head ys)))", "(refl -(head ys))"),
    (PROOFS, "(ρ g - β)", "β"),
    (PROOFS, "(sym -(head xs) -(head ys) (headRel -xs -ys g))", "(sym -(head ys) -(head xs) (headRel -xs -ys g))"),
    (PROOFS, "(ch -(tail ys) -(tail xs) (tailRel -xs -ys g))", "(ch -(tail ys) -(tail xs) (headRel -xs -ys g))"),
    (PROOFS, "(headRel -xs -ys rel1) (headRel -ys -zs rel2)", "(headRel -xs -ys rel1) (headRel -ys -zs rel1)"),
    ("nu/nu.ced", "coa ·Nu -(castRefl ·I ·Nu) inM (unfoldM ·X coa) -i x", "coa ·Nu -(castRefl ·I ·Nu) inM (unfoldM ·X coa) -i coa"),
]


@pytest.mark.parametrize("rel, old, new", MUTANTS)
def test_mutants_are_rejected(mutate, rel, old, new):
    with pytest.raises((TypeCheckError, ModuleError)):
        mutate(rel, old, new)


def test_unmutated_copy_is_accepted(mutate):
    mutate(PROOFS, "(ρ g - β)", "(ρ g - β)")
