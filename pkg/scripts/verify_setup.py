#!/usr/bin/env python3
"""
CVNN Bench Setup Verification Script
====================================
Checks library imports, configuration loading, logger setup, the directory
layout, a tiny forward/backward pass and the MNIST cache.

Run: python scripts/verify_setup.py
"""

import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))


def print_header(title: str) -> None:
    print("\n" + "=" * 60)
    print(f" {title}")
    print("=" * 60)


def print_status(name: str, status: bool, version: str = "") -> None:
    icon = "[OK]" if status else "[FAIL]"
    version_str = f" (v{version})" if version else ""
    print(f"  {icon} {name}{version_str}")


def check_imports() -> bool:
    """Check that the numerical and ambient libraries import."""
    print_header("LIBRARY IMPORTS")
    all_ok = True

    libraries = [
        ("numpy", "NumPy"),
        ("scipy", "SciPy"),
        ("pandas", "pandas"),
        ("pydantic", "Pydantic"),
        ("yaml", "PyYAML"),
        ("dotenv", "python-dotenv"),
        ("loguru", "Loguru"),
    ]

    for module, name in libraries:
        try:
            lib = __import__(module)
            version = getattr(lib, "__version__", "installed")
            print_status(name, True, version)
        except ImportError as e:
            print_status(f"{name} - {e}", False)
            all_ok = False

    return all_ok


def check_configuration() -> bool:
    print_header("CONFIGURATION")

    config_path = project_root / "configs" / "config.yaml"
    if not config_path.exists():
        print_status("config.yaml missing", False)
        return False
    print_status("config.yaml exists", True)

    try:
        from src.utils.config import config

        print_status("ConfigLoader initialized", True)
        print_status(f"Training defaults: {config.epochs} epochs, batch {config.batch_size}, lr {config.learning_rate}", True)
        print_status(f"Init: {config.init_complex_scheme} / {config.init_real_scheme} ({config.fan_mode})", True)
        print_status(f"Environment: {config.environment}", True)
    except Exception as e:
        print_status(f"Config loading failed - {e}", False)
        return False

    manifests = sorted((project_root / "configs" / "experiments").glob("*.yaml"))
    print_status(f"{len(manifests)} experiment manifest(s)", bool(manifests))
    return bool(manifests)


def check_logger() -> bool:
    print_header("LOGGER TEST")

    try:
        from src.utils.logger import get_logger, setup_logger

        setup_logger(console_level="WARNING", file_logging=False)
        get_logger(__name__)
        print_status("Logger setup successful", True)
        return True
    except Exception as e:
        print_status(f"Logger setup failed - {e}", False)
        return False


def check_engine() -> bool:
    """Run forward/backward on a tiny complex model and check its gradients."""
    print_header("NUMERICAL ENGINE")

    try:
        import numpy as np

        from src.core.activations import ctanh
        from src.core.autodiff import (
            backward,
            finite_difference_gradients,
            forward,
            max_relative_error,
            near_seam,
        )
        from src.core.capacity import build_matched_pair
        from src.core.complex_core import ComplexScalar, ComplexTensor, cauchy_riemann_check
        from src.core.initializers import initialize_model
        from src.core.losses import categorical_ce, categorical_ce_grad
        from src.utils.config import config

        _, plan = build_matched_pair("fixed", input_dim=4, output_dim=3, k=2, width=4)
        model = initialize_model(plan, "tanh", "softmax_intensity", seed=0)
        rng = np.random.default_rng(0)
        x = ComplexTensor(rng.normal(size=(5, 4)), rng.normal(size=(5, 4)))
        y = np.eye(3)[rng.integers(0, 3, size=5)]
        tape = forward(model, x)
        grads = backward(tape, model, categorical_ce_grad(tape.output, y))
        ok = grads.is_finite() and np.allclose(tape.output.sum(axis=1), 1.0)
        print_status(f"Forward/backward on widths {plan.hidden_widths}", ok)

        numeric = finite_difference_gradients(model, x, y, categorical_ce, h=config.fd_step)
        error = max_relative_error(grads, numeric, floor=config.fd_relative_floor)
        grad_ok = error < 1e-5 and not near_seam(tape, model, config.seam_margin)
        print_status(f"Finite-difference gradient check (max relative error {error:.2e})", grad_ok)

        cr = cauchy_riemann_check(
            lambda w: ctanh(ComplexScalar(w.real, w.imag)).to_complex(),
            0.3 + 0.2j,
            h=config.cr_step,
            tol=config.cr_tolerance,
        )
        print_status("Cauchy-Riemann holds for tanh", cr.holds)
        return ok and grad_ok and cr.holds
    except Exception as e:
        print_status(f"Engine check failed - {e}", False)
        return False


def check_mnist() -> bool:
    """Report whether the MNIST IDX files are cached (warning only)."""
    print_header("MNIST CACHE")

    from src.services.datasets import mnist_available
    from src.utils.config import config

    if mnist_available():
        print_status(f"IDX files found in {config.data_dir}", True)
        return True
    print_status(f"IDX files not found in {config.data_dir}", False)
    print("    Place the four MNIST IDX files there or set CVNN_DATA_DIR")
    print("    Synthetic experiments work without them")
    return False


def check_directories() -> bool:
    print_header("DIRECTORY STRUCTURE")
    all_ok = True

    directories = [
        "src",
        "src/cli",
        "src/core",
        "src/models",
        "src/services",
        "src/services/datasets",
        "src/utils",
        "configs",
        "configs/experiments",
        "tests",
    ]

    for dir_name in directories:
        if (project_root / dir_name).exists():
            print_status(dir_name, True)
        else:
            print_status(f"{dir_name} - missing", False)
            all_ok = False

    return all_ok


def main() -> int:
    print("\n" + "=" * 60)
    print(" CVNN Bench - Setup Verification")
    print("=" * 60)
    print(f"\nProject Root: {project_root}")
    print(f"Python Version: {sys.version.split()[0]}")

    results = [
        ("Libraries", check_imports()),
        ("Directories", check_directories()),
        ("Configuration", check_configuration()),
        ("Logger", check_logger()),
        ("Engine", check_engine()),
    ]

    # MNIST is optional
    check_mnist()

    print_header("VERIFICATION SUMMARY")
    all_passed = True
    for name, passed in results:
        print_status(name, passed)
        all_passed = all_passed and passed

    print("\n" + "-" * 60)
    if all_passed:
        print(" [SUCCESS] All checks passed.")
        print("-" * 60 + "\n")
        return 0
    print(" [WARNING] Some checks failed. Review the output above.")
    print("-" * 60 + "\n")
    return 1


if __name__ == "__main__":
    sys.exit(main())
