from .green_kernel import GreenKernel, kernel_for, phi

__all__ = ["GreenKernel", "kernel_for", "phi"]
