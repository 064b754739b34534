"""Command-line front end.  Exit codes: 0 success, 1 verification failure, 2 usage error."""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Any

from . import __version__
from .decompositions import family_decomposition, verify_decomposition
from .degeneration import (
    border_rank_certificate,
    degeneration_maps,
    family_eps_decomposition,
    family_tensor,
    verify_degeneration,
)
from .errors import NotADegeneration, NotApplicable, TenrankError, UnverifiedDecomposition
from .families import Family, FamilySpec, make_state, w_state
from .persistence import (
    Persistent,
    certify_rank,
    decide_persistence_qubits,
    ghz_kron_cert,
    pyramid_persistence,
    screen_persistence,
)
from .rates import rate_one_certificate
from .scalars import parse_scalar
from .serialize import (
    FORMAT,
    decomposition_from_obj,
    decomposition_to_obj,
    dumps,
    load_decomposition,
    load_tensor,
    map_from_obj,
    tensor_digest,
    tensor_to_obj,
)
from .tensor import kronecker_product


class VerificationFailed(Exception):
    pass


def _report(command: str, body: dict[str, Any], started: float | None) -> dict[str, Any]:
    out = {"format": FORMAT, "command": command, "version": __version__, **body}
    if started is not None:
        out["wall_time_s"] = round(time.perf_counter() - started, 3)
    return out


def _emit(obj: dict[str, Any], path: str | None = None) -> None:
    text = dumps(obj)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _spec_from_args(args) -> FamilySpec:
    kw: dict[str, Any] = {"d": args.d, "n": args.n}
    fam = Family(args.family)
    if fam is Family.DICKE:
        kw["l"] = args.l
    if fam is Family.NONSYM4:
        kw.update(alpha=Fraction(args.alpha), beta=Fraction(args.beta), sign=1 if args.sign == "+" else -1)
    if fam is Family.Y:
        kw["d"] = 3
    return FamilySpec(fam, **kw)


# ---------------------------------------------------------------- commands


def cmd_gen_state(args) -> dict[str, Any]:
    spec = _spec_from_args(args)
    t = make_state(spec)
    obj = {"format": FORMAT, "label": spec.label(), **tensor_to_obj(t)}
    _emit(obj, args.output)
    return {}


_RECOGNIZED = ("l", "m", "n", "mprime", "nprime")


def _recognize(t) -> str | None:
    d, n = t.shape[0], t.arity
    if any(x != d for x in t.shape) or n < 2 or d < 2:
        return None
    for fam in _RECOGNIZED:
        if family_tensor(fam, d, n) == t:
            return fam
    return None


def _rank_one_file(path: str, cert: str | None, decomp: str | None) -> dict[str, Any]:
    t = load_tensor(path)
    fam = _recognize(t)
    dec = load_decomposition(decomp) if decomp else None
    if fam is not None and cert is None:
        pcert = pyramid_persistence(t) if fam not in ("mprime", "nprime") else None
        if dec is None and fam in ("l", "m", "n", "mprime", "nprime"):
            dec = family_decomposition(fam, t.shape[0], t.arity)
        if pcert is None:
            raise NotApplicable(f"no automatic persistence certificate for family {fam}; pass --cert")
    elif cert == "pyramid":
        pcert = pyramid_persistence(t)
    elif cert == "qubit":
        res = decide_persistence_qubits(t)
        if not isinstance(res, Persistent):
            raise VerificationFailed(f"tensor is not persistent: {res.trace.get('reason')}")
        pcert = res.certificate
    else:
        raise NotApplicable("unrecognized tensor: pass --cert pyramid|qubit (and --decomp for an upper bound)")
    if dec is not None and not verify_decomposition(t, dec):
        raise VerificationFailed("decomposition does not sum to the tensor")
    rc = certify_rank(t, pcert, dec)
    return {"file": path, "family": fam, "rank": rc.to_obj()}


def cmd_rank_cert(args) -> dict[str, Any]:
    jobs = [(p, args.cert, args.decomp) for p in args.tensors]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_rank_one_file, *zip(*jobs)))
    else:
        results = [_rank_one_file(*j) for j in jobs]
    return {"subjects": results}


def cmd_verify_decomp(args) -> dict[str, Any]:
    t = load_tensor(args.tensor)
    dec = load_decomposition(args.decomp)
    ok = verify_decomposition(t, dec)
    body = {"subject": tensor_digest(t), "terms": len(dec), "verified": ok}
    if not ok:
        raise VerificationFailed(json.dumps(body))
    body["rank_upper_bound"] = len(dec)
    return body


def _parse_vec(text: str) -> tuple:
    return tuple(parse_scalar(x) for x in text.split(","))


def cmd_persist(args) -> dict[str, Any]:
    t = load_tensor(args.tensor)
    method = args.method
    if method == "auto":
        try:
            return {"subject": tensor_digest(t), "result": "Persistent", "certificate": pyramid_persistence(t).to_obj()}
        except NotApplicable:
            method = "qubit" if all(x == 2 for x in t.shape) and t.arity <= 4 else "screen"
    if method == "pyramid":
        return {"subject": tensor_digest(t), "result": "Persistent", "certificate": pyramid_persistence(t).to_obj()}
    if method == "qubit":
        res = decide_persistence_qubits(t, [_parse_vec(c) for c in args.candidate])
        body = {"subject": tensor_digest(t), "result": "Persistent" if res.persistent else "NotPersistent"}
        if isinstance(res, Persistent):
            body["certificate"] = res.certificate.to_obj()
        else:
            body["conclusive"] = res.conclusive
            body["trace"] = res.trace
        return body
    res = screen_persistence(t, args.trials, args.seed)
    body = {"subject": tensor_digest(t), "result": res.outcome.value, "conclusive": False, "trace": res.trace}
    if res.certificate is not None:
        body["certificate"] = res.certificate.to_obj()
    return body


def cmd_degen(args) -> dict[str, Any]:
    if args.source_file:
        if not (args.maps and args.target_file):
            raise TenrankError("--source-file needs --maps and --target-file")
        src, tgt = load_tensor(args.source_file), load_tensor(args.target_file)
        with open(args.maps) as fh:
            maps = map_from_obj(json.load(fh))
    else:
        if not (args.source and args.target):
            raise TenrankError("give --source/--target families or --source-file/--maps/--target-file")
        maps, _ = degeneration_maps(args.source, args.target, args.d, args.n)
        src, tgt = family_tensor(args.source, args.d, args.n), family_tensor(args.target, args.d, args.n)
    try:
        cert = verify_degeneration(src, maps, tgt)
    except NotADegeneration as exc:
        raise VerificationFailed(str(exc)) from exc
    return {"degeneration": cert.to_obj()}


def cmd_border(args) -> dict[str, Any]:
    if args.tensor:
        t = load_tensor(args.tensor)
        if not args.eps_decomp:
            raise TenrankError("a tensor file needs --eps-decomp")
        with open(args.eps_decomp) as fh:
            obj = json.load(fh)
        dec = decomposition_from_obj(obj)
    else:
        t = family_tensor(args.family, args.d, args.n)
        dec = family_eps_decomposition(args.family, args.d, args.n)
    try:
        cert = border_rank_certificate(t, dec)
    except TenrankError as exc:
        raise VerificationFailed(str(exc)) from exc
    return {"border_rank": cert.to_obj()}


def cmd_rate(args) -> dict[str, Any]:
    maps, _ = degeneration_maps(args.source, args.target, args.d, args.n)
    src, tgt = family_tensor(args.source, args.d, args.n), family_tensor(args.target, args.d, args.n)
    res = rate_one_certificate(src, tgt, maps)
    body = {"result": "RateOne" if res.rate_one else "Inconclusive", "trace": res.trace}
    if not res.rate_one:
        raise VerificationFailed(dumps(body))
    return body


def cmd_kron_cert(args) -> dict[str, Any]:
    n, d2 = args.n, args.d2
    if args.family == "ww":
        p = kronecker_product(w_state(n), w_state(n))
        dec = family_decomposition("m", 4, n)
    elif args.family == "w":
        p, dec = w_state(n), family_decomposition("w", 2, n)
    else:
        p, dec = family_tensor(args.family, d2, n), family_decomposition(args.family, d2, n)
    pc = certify_rank(p, pyramid_persistence(p), dec)
    rc = ghz_kron_cert(p, pc, args.d, args.mode)
    out = {"rank": rc.to_obj()}
    if args.decomp_out:
        _emit({"format": FORMAT, **decomposition_to_obj(rc.decomposition)}, args.decomp_out)
    return out


def cmd_selftest(args) -> dict[str, Any]:
    from .selftest import run

    results = run(args.only)
    lines = []
    for k, name, ok, detail in results:
        line = f"[{'PASS' if ok else 'FAIL'}] {k:2d} {name}: {detail}"
        print(line, file=sys.stderr)
        lines.append({"criterion": k, "name": name, "passed": ok, "detail": detail})
    body = {"criteria": lines, "passed": all(r[2] for r in results)}
    if not body["passed"]:
        raise VerificationFailed(dumps(body))
    return body


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tenrank", description="Exact tensor-rank certification for persistent tensors.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--timing", action="store_true", help="add wall time to reports (breaks byte-for-byte determinism)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-state", help="write a family tensor as JSON")
    g.add_argument("--family", required=True, choices=[f.value for f in Family])
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--l", type=int, default=1, help="excitations for dicke")
    g.add_argument("--alpha", default="1")
    g.add_argument("--beta", default="1")
    g.add_argument("--sign", choices=["+", "-"], default="+")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen_state)

    r = sub.add_parser("rank-cert", help="certify tensor rank bounds")
    r.add_argument("tensors", nargs="+")
    r.add_argument("--cert", choices=["pyramid", "qubit"])
    r.add_argument("--decomp")
    r.add_argument("--jobs", type=int, default=1)
    r.set_defaults(func=cmd_rank_cert)

    v = sub.add_parser("verify-decomp", help="check a decomposition exactly")
    v.add_argument("tensor")
    v.add_argument("decomp")
    v.set_defaults(func=cmd_verify_decomp)

    ps = sub.add_parser("persist", help="persistence certificate, decision or screening")
    ps.add_argument("tensor")
    ps.add_argument("--method", choices=["auto", "pyramid", "qubit", "screen"], default="auto")
    ps.add_argument("--candidate", action="append", default=[], help="extra witness, e.g. 0,1")
    ps.add_argument("--trials", type=int, default=20)
    ps.add_argument("--seed", type=int)
    ps.set_defaults(func=cmd_persist)

    dg = sub.add_parser("degen", help="verify a degeneration")
    dg.add_argument("--source", choices=["ghz", "l", "m", "n"])
    dg.add_argument("--target", choices=["ghz", "l", "m", "n"])
    dg.add_argument("--d", type=int, default=3)
    dg.add_argument("--n", type=int, default=3)
    dg.add_argument("--source-file")
    dg.add_argument("--target-file")
    dg.add_argument("--maps")
    dg.set_defaults(func=cmd_degen)

    b = sub.add_parser("border", help="border-rank certificate")
    b.add_argument("--family", choices=["l", "m", "n", "mprime", "nprime", "ghz"])
    b.add_argument("--d", type=int, default=3)
    b.add_argument("--n", type=int, default=3)
    b.add_argument("--tensor")
    b.add_argument("--eps-decomp")
    b.set_defaults(func=cmd_border)

    rt = sub.add_parser("rate", help="rate-one certificate between chain families")
    rt.add_argument("--source", required=True, choices=["ghz", "l", "m", "n"])
    rt.add_argument("--target", required=True, choices=["ghz", "l", "m", "n"])
    rt.add_argument("--d", type=int, default=3)
    rt.add_argument("--n", type=int, default=3)
    rt.set_defaults(func=cmd_rate)

    k = sub.add_parser("kron-cert", help="exact rank of GHZ combined with a minimal-rank persistent tensor")
    k.add_argument("--family", required=True, choices=["w", "ww", "l", "m", "n"])
    k.add_argument("--d", type=int, required=True, help="GHZ local dimension")
    k.add_argument("--d2", type=int, default=3, help="local dimension of L, M or N")
    k.add_argument("--n", type=int, default=3)
    k.add_argument("--mode", choices=["kron", "tensor"], default="kron")
    k.add_argument("--decomp-out")
    k.set_defaults(func=cmd_kron_cert)

    st = sub.add_parser("selftest", help="run the acceptance corpus")
    st.add_argument("--only", type=int, action="append", help="criterion number (repeatable)")
    st.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter() if args.timing else None
    try:
        body = args.func(args)
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except UnverifiedDecomposition as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except (TenrankError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.command != "gen-state":
        _emit(_report(args.command, body, started))
    return 0


if __name__ == "__main__":
    sys.exit(main())
