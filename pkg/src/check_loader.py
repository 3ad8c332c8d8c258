"""Check discovery and dynamic loading for the `check` command."""

import importlib.util
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from errors import AccuracyError, ResourceError
from schemas import CheckManifest, CheckParams, CheckResult

logger = logging.getLogger(__name__)

CHECKS_DIR = Path(__file__).resolve().parent / "checks"


@dataclass(frozen=True)
class Check:
    manifest: CheckManifest
    params_model: type[CheckParams]
    run: Callable[[CheckParams], CheckResult]

    @property
    def name(self) -> str:
        return self.manifest.name


def _import_check_module(check_dir: Path):
    spec = importlib.util.spec_from_file_location(f"check_{check_dir.name}", check_dir / "check.py")
    if spec is None or spec.loader is None:
        raise ImportError(f"cannot create spec for {check_dir / 'check.py'}")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def load_checks() -> dict[str, Check]:
    """Discover and load all checks from the checks directory.

    Returns:
        Mapping from manifest name to Check. Broken checks are skipped with
        an error log, so one bad directory never hides the others.
    """
    checks: dict[str, Check] = {}
    if not CHECKS_DIR.exists():
        logger.warning(f"Checks directory does not exist: {CHECKS_DIR}")
        return checks

    for check_dir in sorted(d for d in CHECKS_DIR.iterdir() if d.is_dir() and not d.name.startswith("_")):
        dir_name = check_dir.name
        manifest_path = check_dir / "manifest.json"
        if not manifest_path.exists():
            logger.warning(f"Check '{dir_name}': manifest.json not found, skipping")
            continue
        try:
            with open(manifest_path) as f:
                manifest = CheckManifest(**json.load(f))
        except Exception as e:
            logger.error(f"Check '{dir_name}': failed to validate manifest: {e}, skipping")
            continue

        if not (check_dir / "check.py").exists():
            logger.error(f"Check '{dir_name}': check.py not found, skipping")
            continue
        try:
            module = _import_check_module(check_dir)
        except Exception as e:
            logger.error(f"Check '{dir_name}': failed to import check.py: {e}, skipping")
            continue

        params_model = getattr(module, "Params", None)
        run = getattr(module, "run", None)
        if not (isinstance(params_model, type) and issubclass(params_model, CheckParams)) or not callable(run):
            logger.error(f"Check '{dir_name}': needs a CheckParams subclass 'Params' and a 'run' function, skipping")
            continue
        checks[manifest.name] = Check(manifest=manifest, params_model=params_model, run=run)
        logger.debug(f"Loaded check '{manifest.name}' v{manifest.version}")

    logger.debug(f"Check loader: {len(checks)} check(s) loaded")
    return checks


def run_check(check: Check, raw_params: dict[str, Any]) -> CheckResult:
    """Validate params and run the check.

    Accuracy and resource failures become an "error" result carrying what was
    computed; invalid params and failed hypotheses propagate to the caller.
    """
    params = check.params_model(**raw_params)
    try:
        return check.run(params)
    except (AccuracyError, ResourceError) as e:
        data: dict[str, Any] = {"error": type(e).__name__}
        if isinstance(e, AccuracyError):
            data["est_error"] = e.est_error
            partial = e.partial
            if hasattr(partial, "model_dump"):
                partial = partial.model_dump(mode="json")
            elif hasattr(partial, "tolist"):
                partial = partial.tolist()
            data["partial"] = partial
        else:
            completed = e.completed_up_to
            data["completed_up_to"] = str(completed) if completed is not None else None
        logger.warning(f"Check '{check.name}' failed: {e}")
        return CheckResult(status="error", check=check.name, summary=str(e), data=data)
