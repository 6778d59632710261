"""Plain-text key=value run configuration.

Keys mirror the training-config field names exactly; CLI flags override
file values. Unknown keys and malformed values are rejected with the
file name and line number.
"""

from __future__ import annotations

from pathlib import Path


class ConfigError(ValueError):
    """Invalid configuration file or flag value."""


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip() != ""]


def _parse_float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip() != ""]


def _parse_matrix(text: str) -> list[list[float]]:
    """Semicolon-separated rows of comma-separated floats."""
    return [_parse_float_list(row) for row in text.split(";") if row.strip() != ""]


# key -> (parser, default, help)
SCHEMA: dict[str, tuple] = {
    # generator-update knobs (names match the training config exactly)
    "delta1": (str, "bce", "inversion discrepancy: bce|l2|l1|minimax[:mean|sum]"),
    "lambda1": (float, 1.0, "inversion learning rate"),
    "n1": (int, 1, "inversion steps"),
    "delta2": (str, "l2", "regression loss: l2|l1[:mean|sum]"),
    "lambda2": (float, 2e-4, "regression learning rate"),
    "n2": (int, 1, "regression steps"),
    "optimizer": (str, "sgd", "sgd|momentum|adam"),
    "eta_f": (float, 2e-4, "discriminator learning rate"),
    "eta_g": (float, 2e-4, "standard-regime generator learning rate"),
    # plan
    "plan_id": (str, "run", "plan identifier"),
    "regime": (str, "subproblem", "standard|subproblem|equivalence-pair"),
    "steps": (int, 500, "training steps"),
    "eval_every": (int, 100, "metric snapshot cadence (0 = final only)"),
    "seeds": (_parse_int_list, [0], "comma-separated seed list"),
    "batch_size": (int, 64, "examples per step"),
    "eval_samples": (int, 2048, "samples per metric evaluation"),
    "allow_nonequivalent": (_parse_bool, False,
                            "run equivalence pairs even when the config breaks equivalence mode"),
    # models
    "model": (str, "mlp", "mlp|toy"),
    "gen_hidden": (_parse_int_list, [16, 16], "generator hidden sizes"),
    "disc_hidden": (_parse_int_list, [16, 16], "discriminator hidden sizes"),
    "activation": (str, "tanh", "hidden activation: tanh|sigmoid|relu"),
    # data / noise
    "data_kind": (str, "gaussian", "gaussian|mixture|ring|uniform"),
    "data_dim": (int, 2, "data dimension"),
    "data_mu": (_parse_matrix, [[0.0, 0.0]], "component means, ';'-separated rows"),
    "data_sigma": (str, "1,1", "per-component covariance: diag list or '|'-separated rows; ';' between components"),
    "data_weights": (_parse_float_list, [1.0], "mixture weights"),
    "data_radius": (float, 1.0, "ring radius"),
    "data_noise_std": (float, 0.05, "ring noise standard deviation"),
    "noise_kind": (str, "gaussian", "gaussian|uniform"),
    "noise_dim": (int, 2, "noise dimension"),
    "out_dir": (str, "runs", "output directory"),
}


def defaults() -> dict:
    return {key: spec[1] for key, spec in SCHEMA.items()}


def parse_value(key: str, raw: str):
    if key not in SCHEMA:
        raise ConfigError(f"unknown key {key!r}")
    parser = SCHEMA[key][0]
    try:
        return parser(raw.strip())
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad value for {key!r}: {raw.strip()!r} ({exc})") from None


def parse_config_file(path) -> dict:
    """Parse key=value lines; '#' starts a comment; blank lines ignored."""
    path = Path(path)
    values: dict = {}
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc})") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        try:
            values[key] = parse_value(key, raw)
        except ConfigError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
    return values


def format_value(key: str, value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        if value and isinstance(value[0], (list, tuple)):
            return ";".join(",".join(repr(float(v)) for v in row) for row in value)
        return ",".join(str(v) for v in value)
    return str(value)


def write_config(values: dict, path) -> None:
    """Serialize the fully resolved configuration next to its artifacts."""
    lines = [f"{key}={format_value(key, values[key])}" for key in SCHEMA if key in values]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_sigma_spec(text: str) -> list[list[list[float]]]:
    """Per-component covariance blocks.

    Each ';'-separated block is either a comma list (diagonal) or
    '|'-separated full rows.
    """
    blocks = []
    for block in text.split(";"):
        block = block.strip()
        if not block:
            continue
        if "|" in block:
            blocks.append([_parse_float_list(row) for row in block.split("|")])
        else:
            diag = _parse_float_list(block)
            blocks.append([[diag[i] if i == j else 0.0 for j in range(len(diag))]
                           for i in range(len(diag))])
    return blocks
