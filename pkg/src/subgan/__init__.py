"""GAN generator training decomposed into two explicit subproblems:
label inversion into data space, then regression onto the inverted
targets. Includes a minimal reverse-mode autodiff engine, both training
regimes, kernel-based inductive-bias diagnostics, synthetic data with
Gaussian-Frechet quality metrics, and a CLI harness."""

from .autodiff import (ComputationRecord, JacobianMatrix, ShapeMismatchError,
                       Tensor, backward, backprop, forward, jacobian)
from .losses import (Discrepancy, bce_logits_loss, bce_loss, l1_discrepancy,
                     l2_discrepancy)
from .models import (Mlp, Model, ToyDiscriminator, ToyGenerator, load_model,
                     make_model, save_model)
from .training import (DivergenceError, InverseBatch, StepReport,
                       SubproblemConfig, discriminator_step, invert_labels,
                       regress_on_targets, standard_generator_step,
                       subproblem_generator_step, train)

__version__ = "0.1.0"
