"""Command-line shell: spec ingestion, session config, result cache, emitters.

Subcommands: classes, irreps --m K, shintani --m K, theta,
scan --mmax K [--stride n], csheaf, verify [--suite name].
Exit codes: 0 pass, 1 check failure, 2 config error, 3 cap exceeded.
Outputs are deterministic; the cache (rooted at SHINTANI_CACHE or --cache) is
keyed by the content hash of (spec bytes, command, parameters, version) and a
hit replays the stored artifact bit-exactly.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass

from . import __version__
from . import cyclotomic as _cyc
from . import gf as _gf
from . import groups as _groups
from .cyclotomic import OrderCapError
from .descent import FiniteDescentSession, ScanError
from .doubles import double_simples, cs_trace_function, sigma_action, integrality_report
from .gf import TowerCapError
from .groups import (GroupCapError, ValidationError, automorphism, build_group,
                     identity_map, inner_map)
from .twist import twisted_classes
from .unipotent import UnipotentDescentSession, unipotent_scan
from . import verify as _verify


class ConfigError(ValueError):
    pass


@dataclass
class SessionConfig:
    spec_path: str
    m: int = 1
    m_max: int = 48
    stride: int | None = None
    fmt: str = "json"
    cache_dir: str | None = None
    tie_break: int = 0
    suite: str = "full"
    sigma: str = "auto"
    field_cap: int = _gf.FIELD_ORDER_CAP
    group_cap: int = _groups.GROUP_ORDER_CAP
    order_cap: int = _cyc.ORDER_CAP

    def apply_caps(self):
        _gf.FIELD_ORDER_CAP = self.field_cap
        _groups.GROUP_ORDER_CAP = self.group_cap
        _cyc.set_order_cap(self.order_cap)


def parse_spec(path):
    """(spec dict, group or None, automorphism or None, mode, warnings).

    Finite-model specs return the constructed (group, frobenius); connected
    specs return the parameters for per-level session construction.
    """
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read spec file {path}: {e}")
    try:
        spec = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON in {path}: line {e.lineno}, column {e.colno}: {e.msg}")
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"{path}: spec must be an object with a 'kind' field")
    warnings = []
    mode = spec.get("mode")
    if mode is None:
        mode = "connected" if spec["kind"] == "unitriangular" else "finite"
    if mode not in ("finite", "connected"):
        raise ConfigError(f"{path}: field 'mode' must be 'finite' or 'connected'")
    if mode == "connected":
        if spec["kind"] != "unitriangular":
            raise ConfigError(f"{path}: connected mode requires kind 'unitriangular'")
        if "automorphism" in spec and "frobenius" not in spec["automorphism"]:
            raise ConfigError(f"{path}: connected automorphism must be a 'frobenius' power")
        return spec, raw, None, None, mode, warnings
    try:
        group = build_group(spec)
    except (ValidationError, ValueError, KeyError, TypeError) as e:
        if isinstance(e, GroupCapError):
            raise
        raise ConfigError(f"{path}: invalid group spec: {e}")
    aut = spec.get("automorphism")
    if aut is None:
        warnings.append("no automorphism given; defaulting to the identity")
        frob = identity_map(group)
    else:
        frob = _parse_automorphism(path, group, aut)
    return spec, raw, group, frob, mode, warnings


def _parse_automorphism(path, group, aut):
    if not isinstance(aut, dict):
        raise ConfigError(f"{path}: field 'automorphism' must be an object")
    if "frobenius" in aut:
        from .groups import frobenius_map
        return frobenius_map(group, int(aut["frobenius"]))
    if "inner" in aut:
        idx = _element_index(path, group, aut["inner"])
        return inner_map(group, idx)
    if "images" in aut:
        images = [_element_index(path, group, v) for v in aut["images"]]
        if len(images) != len(group.gens):
            raise ConfigError(
                f"{path}: automorphism.images needs {len(group.gens)} entries "
                f"(one per generator), got {len(images)}")
        try:
            return automorphism(group, images)
        except ValidationError as e:
            raise ConfigError(f"{path}: automorphism rejected: {e}")
    raise ConfigError(f"{path}: automorphism needs 'images', 'inner' or 'frobenius'")


def _element_index(path, group, value):
    label = value
    if isinstance(value, list):
        label = tuple(tuple(r) if isinstance(r, list) else r for r in value)
    if label not in group.index:
        raise ConfigError(f"{path}: {value!r} is not an element of the group")
    return group.index[label]


def _meta(cfg, raw):
    return {
        "spec_sha256": hashlib.sha256(raw).hexdigest(),
        "version": __version__,
        "caps": {"field": cfg.field_cap, "group": cfg.group_cap, "cyclotomic": cfg.order_cap},
        "tie_break": cfg.tie_break,
    }


def _emit(cfg, meta, name, columns, rows, extra=None):
    if cfg.fmt == "json":
        doc = {"meta": meta, name: [dict(zip(columns, r)) for r in rows]}
        if extra:
            doc.update(extra)
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"
    lines = [f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in sorted(meta.items())]
    if extra:
        lines += [f"# {k}: {json.dumps(v, sort_keys=True, default=str)}" for k, v in sorted(extra.items())]
    lines.append(";".join(columns))
    for r in rows:
        lines.append(";".join(str(x) for x in r))
    return "\n".join(lines) + "\n"


# -- commands -------------------------------------------------------------------


def _connected_session(cfg, spec, m):
    fld = spec.get("field", {"p": 2, "degree": 1})
    return UnipotentDescentSession(int(spec.get("n", 3)), int(fld["p"]),
                                   int(fld.get("degree", 1)), m, tie_break=cfg.tie_break)


def _cmd_classes(cfg, meta, group, frob, mode, spec):
    if mode == "connected":
        sess = _connected_session(cfg, spec, int(spec.get("m", cfg.m)))
        rows = [(i, repr(sess.space1.reps[i]), sess.space1.sizes[i], sess.space1.stabs[i])
                for i in range(len(sess.space1))]
        return _emit(cfg, dict(meta, field=_field_header(sess)), "classes",
                     ["orbit", "representative", "size", "stabilizer_order"], rows)
    tc = twisted_classes(group, frob)
    rows = [(i, tc.reps[i], repr(group.elements[tc.reps[i]]), tc.sizes[i], tc.stab_order(i))
            for i in range(len(tc.reps))]
    return _emit(cfg, meta, "classes",
                 ["orbit", "representative_index", "representative", "size", "stabilizer_order"], rows)


def _cmd_irreps(cfg, meta, group, frob, mode, spec):
    from .chartab import table_to_csv, table_to_json
    if mode == "connected":
        sess = _connected_session(cfg, spec, cfg.m)
        blocks = [{"form": 0, "h1_rep_index": 0, "order": sess.gm.order,
                   "table": table_to_json(sess.table_m())}]
        csv_blocks = [f"# form 0 (order {sess.gm.order})\n" + table_to_csv(sess.table_m())]
        meta = dict(meta, field=_field_header(sess))
    else:
        sess = FiniteDescentSession(group, frob, tie_break=cfg.tie_break)
        forms = sess.forms(cfg.m)
        blocks, csv_blocks = [], []
        for k in range(len(forms)):
            table = sess.form_table(cfg.m, k)
            blocks.append({"form": k, "h1_rep_index": forms.reps[k],
                           "order": forms.fixed[k].order, "table": table_to_json(table)})
            csv_blocks.append(f"# form {k} (H^1 rep {forms.reps[k]}, "
                              f"order {forms.fixed[k].order})\n" + table_to_csv(table))
    if cfg.fmt == "json":
        return json.dumps({"meta": meta, "m": cfg.m, "forms": blocks},
                          sort_keys=True, indent=1) + "\n"
    header = [f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in sorted(meta.items())]
    return "\n".join(header + [f"# m: {cfg.m}"]) + "\n" + "\n".join(csv_blocks)


def _field_header(sess):
    t = sess.tower
    return {"p": t.p, "ambient_degree": t.degree, "modulus": list(t.modulus),
            "level": sess.k * sess.m}


def _cmd_shintani(cfg, meta, group, frob, mode, spec):
    if mode == "connected":
        sess = _connected_session(cfg, spec, cfg.m)
        basis = sess.shintani_basis()
    else:
        sess = FiniteDescentSession(group, frob, tie_break=cfg.tie_break)
        basis = sess.shintani_basis(cfg.m)
    rows = [(lab.form, lab.row) + tuple(v.to_string() for v in fn.values)
            for lab, fn in zip(basis.labels, basis.vectors)]
    cols = ["form", "row"] + [f"orbit{i}" for i in range(len(rows[0]) - 2 if rows else 0)]
    return _emit(cfg, meta, "shintani_basis", cols, rows, extra={"m": cfg.m})


def _cmd_theta(cfg, meta, group, frob, mode, spec):
    if mode == "connected":
        sess = _connected_session(cfg, spec, int(spec.get("m", cfg.m)))
    else:
        sess = FiniteDescentSession(group, frob, tie_break=cfg.tie_break)
    perm = sess.theta_perm()
    rows = [(i, perm[i]) for i in range(len(perm))]
    return _emit(cfg, meta, "theta_permutation", ["orbit", "image"], rows)


def _cmd_scan(cfg, meta, group, frob, mode, spec):
    if mode == "connected":
        fld = spec.get("field", {"p": 2, "degree": 1})
        res = unipotent_scan(int(spec.get("n", 3)), int(fld["p"]), int(fld.get("degree", 1)),
                             m_max=cfg.m_max, stride=cfg.stride or 1, tie_break=cfg.tie_break)
        sess = res.session
    else:
        sess = FiniteDescentSession(group, frob, tie_break=cfg.tie_break)
        res = sess.stabilization_scan(cfg.m_max, cfg.stride)
    eig = sess.theta_eigencheck(res.almost_characters) if mode != "connected" else \
        _connected_eigs(sess, res)
    doc = {
        "meta": meta,
        "m0": res.m0,
        "attempts": res.attempts,
        "almost_characters": [
            {"label": {"m": lab.m, "form": lab.form, "row": lab.row},
             "values": [v.to_string() for v in fn.values],
             "theta_eigenvalue": {"k": e[0], "n": e[1]} if e else None}
            for lab, fn, e in zip(res.basis.labels, res.basis.vectors, eig)],
        "certificates": {
            str(m): [{"at_m0": i, "at_m": j, "ratio": r.to_string(),
                      "ratio_root": r.as_root_of_unity()} for i, j, r in cert]
            for m, cert in res.certificates.items()},
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _connected_eigs(sess, res):
    out = []
    for v in res.almost_characters:
        tv = sess.theta_apply(v)
        lam = next((a / b for a, b in zip(tv.values, v.values) if not b.is_zero()), None)
        ok = lam is not None and all(x == lam * y for x, y in zip(tv.values, v.values))
        out.append(lam.as_root_of_unity() if ok and lam is not None else None)
    return out


def _cmd_csheaf(cfg, meta, group, frob, mode, spec):
    if mode == "connected":
        raise ConfigError("csheaf applies to the finite model only")
    if cfg.sigma != "auto":
        raise ConfigError("only --sigma auto (the spec's automorphism) is supported")
    simples = double_simples(group)
    perm, fixed = sigma_action(group, simples, frob)
    fixed_idx = {i: u for i, u in fixed}
    sess = FiniteDescentSession(group, frob, tie_break=cfg.tie_break)
    rows = []
    for i, s in enumerate(simples):
        trace = None
        if i in fixed_idx:
            fn = cs_trace_function(group, s, frob, fixed_idx[i], tie_break=cfg.tie_break)
            trace = [v.to_string() for v in fn.values]
        rows.append((i, s.class_id, s.class_rep, s.rho_row, s.dim, s.twist.to_string(),
                     perm[i], json.dumps(trace)))
    cols = ["simple", "class", "class_rep_index", "rho_row", "dim", "twist",
            "sigma_image", "trace_function"]
    report = integrality_report(group)
    return _emit(cfg, meta, "double_simples", cols, rows,
                 extra={"integrality": report, "fixed_count": len(fixed)})


def _cmd_verify(cfg, meta, group, frob, mode, spec):
    if mode == "connected":
        lines, passed = _verify_connected(cfg, spec)
    else:
        results = _verify.run_all(group, frob, m_max=cfg.m_max, suite=cfg.suite)
        lines = [f"{'PASS' if ok else 'FAIL'} {name}: {detail}" for name, ok, detail in results]
        passed = all(ok for _, ok, _ in results)
    doc = {"meta": meta, "checks": lines, "pass": passed}
    text = json.dumps(doc, sort_keys=True, indent=1) + "\n" if cfg.fmt == "json" \
        else "\n".join(lines) + f"\nresult: {'pass' if passed else 'FAIL'}\n"
    return (0 if passed else 1), text


def _verify_connected(cfg, spec):
    fld = spec.get("field", {"p": 2, "degree": 1})
    n, p, k = int(spec.get("n", 3)), int(fld["p"]), int(fld.get("degree", 1))
    lines, passed = [], True
    ms = (1, 2) if cfg.suite != "deep" else (1, 2, 4)
    for m in ms:
        sess = UnipotentDescentSession(n, p, k, m, tie_break=cfg.tie_break)
        basis = sess.shintani_basis()
        ok = _verify._gram_is_identity(basis.vectors) and len(basis.vectors) == len(sess.space1)
        lines.append(f"{'PASS' if ok else 'FAIL'} orthonormality m={m}")
        passed &= ok
        okipf = all(sess.ipf_crosscheck(w, vr) for w in sess.f_fixed()
                    for vr in range(len(sess.space1)))
        lines.append(f"{'PASS' if okipf else 'FAIL'} inner-product-formula m={m}")
        passed &= okipf
    try:
        res = unipotent_scan(n, p, k, m_max=cfg.m_max, stride=cfg.stride or 1)
        lines.append(f"PASS stabilization: m0={res.m0}")
    except ScanError as e:
        lines.append(f"FAIL stabilization: {e}")
        passed = False
    return lines, passed


COMMANDS = {
    "classes": _cmd_classes,
    "irreps": _cmd_irreps,
    "shintani": _cmd_shintani,
    "theta": _cmd_theta,
    "scan": _cmd_scan,
    "csheaf": _cmd_csheaf,
    "verify": _cmd_verify,
}


def run_command(cmd: str, cfg: SessionConfig):
    """(exit code, artifact text). Caching and cap plumbing happen here."""
    cfg.apply_caps()
    try:
        spec, raw, group, frob, mode, warnings = parse_spec(cfg.spec_path)
    except ConfigError as e:
        return 2, json.dumps({"error": str(e), "code": 2}) + "\n"
    except (GroupCapError, TowerCapError, OrderCapError) as e:
        return 3, json.dumps({"error": str(e), "code": 3}) + "\n"
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)

    key_src = raw + cmd.encode() + json.dumps(
        [cfg.m, cfg.m_max, cfg.stride, cfg.fmt, cfg.tie_break, cfg.suite, cfg.sigma,
         cfg.field_cap, cfg.group_cap, cfg.order_cap, __version__]).encode()
    key = hashlib.sha256(key_src).hexdigest()
    cached = _cache_get(cfg, key)
    if cached is not None:
        code_line, text = cached
        return int(code_line), text

    meta = _meta(cfg, raw)
    try:
        out = COMMANDS[cmd](cfg, meta, group, frob, mode, spec)
        code, text = out if isinstance(out, tuple) else (0, out)
    except ConfigError as e:
        return 2, json.dumps({"error": str(e), "code": 2}) + "\n"
    except ScanError as e:
        return 2, json.dumps({"error": f"m_max too small: {e}", "code": 2}) + "\n"
    except (GroupCapError, TowerCapError, OrderCapError) as e:
        return 3, json.dumps({"error": str(e), "code": 3}) + "\n"
    _cache_put(cfg, key, code, text)
    return code, text


def _cache_root(cfg):
    return cfg.cache_dir or os.environ.get("SHINTANI_CACHE")


def _cache_get(cfg, key):
    root = _cache_root(cfg)
    if not root:
        return None
    path = os.path.join(root, key[:2], key)
    try:
        with open(path, "r") as fh:
            code = fh.readline().strip()
            return code, fh.read()
    except OSError:
        return None


def _cache_put(cfg, key, code, text):
    root = _cache_root(cfg)
    if not root:
        return
    path = os.path.join(root, key[:2], key)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(f"{code}\n{text}")
    os.replace(tmp, path)


class _CacheLock:
    """One session at a time per cache directory."""

    def __init__(self, root):
        self.root = root
        self.fd = None

    def __enter__(self):
        if self.root:
            os.makedirs(self.root, exist_ok=True)
            path = os.path.join(self.root, "lock")
            try:
                self.fd = os.open(path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            except FileExistsError:
                raise ConfigError(f"cache directory {self.root} is locked by another session")
        return self

    def __exit__(self, *exc):
        if self.fd is not None:
            os.close(self.fd)
            os.unlink(os.path.join(self.root, "lock"))


def main(argv=None):
    ap = argparse.ArgumentParser(prog="shintani",
                                 description="Exact Shintani descent and almost characters")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--spec", required=True, help="group spec JSON file")
    ap.add_argument("--m", type=int, default=1, help="Frobenius power for irreps/shintani")
    ap.add_argument("--mmax", type=int, default=48, help="scan bound")
    ap.add_argument("--stride", type=int, default=None, help="scan stride override")
    ap.add_argument("--format", choices=["csv", "json"], default="json")
    ap.add_argument("--cache", default=None, help="cache root (default: SHINTANI_CACHE)")
    ap.add_argument("--tie-break", type=int, default=0,
                    help="extension-choice override; shifts outputs by roots of unity")
    ap.add_argument("--suite", default="full", help="verify: which sub-suite to run")
    ap.add_argument("--sigma", default="auto",
                    help="csheaf: which Frobenius action to use (only 'auto')")
    ap.add_argument("--group-cap", type=int, default=_groups.GROUP_ORDER_CAP)
    ap.add_argument("--field-cap", type=int, default=_gf.FIELD_ORDER_CAP)
    ap.add_argument("--order-cap", type=int, default=_cyc.ORDER_CAP)
    args = ap.parse_args(argv)
    cfg = SessionConfig(spec_path=args.spec, m=args.m, m_max=args.mmax, stride=args.stride,
                        fmt=args.format, cache_dir=args.cache, tie_break=args.tie_break,
                        suite=args.suite, sigma=args.sigma, field_cap=args.field_cap,
                        group_cap=args.group_cap, order_cap=args.order_cap)
    try:
        with _CacheLock(_cache_root(cfg)):
            code, text = run_command(args.command, cfg)
    except ConfigError as e:
        print(json.dumps({"error": str(e), "code": 2}))
        return 2
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
