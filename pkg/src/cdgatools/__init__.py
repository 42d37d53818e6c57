"""Exact constructive models for rational Poincare duality algebras.

Everything runs over Q with Fraction arithmetic: finite multiplication
tables for CDGAs, differential modules over them, semi-trivial mapping
cones, orphan repair, shriek maps and the pretty models they induce,
disk bundle models, and a text format plus CLI tying it together.
"""

from .bundle import (DiskBundleModel, disk_bundle_pretty_model,
                     sphere_bundle_model, verify_bundle_equivalence)
from .cdga import (CdgaMorphism, CdgaTable, DiffIdeal, ValidationFailure,
                   ValidationResult, acyclic_truncation, adjoin_even_truncated,
                   adjoin_odd_generator, cohomology_algebra,
                   ideal_generated_by, identity_morphism, is_acyclic_ideal,
                   is_quasi_iso, quotient_by_ideal, truncate_table,
                   validate_cdga, validate_ideal, validate_morphism)
from .corpus import corpus_names, corpus_text, load_corpus, resolve_document
from .dgmodule import (DgModule, DgModuleMap, is_balanced, mapping_cone,
                       restrict_scalars, self_module, semi_trivial_cone,
                       shifted_dual_module, suspend_module, validate_module,
                       validate_module_map)
from .document import CdgaDocument, ParseError, parse, parse_file, serialize
from .graded import (CochainComplex, GradedMap, GradedSpace, InputError,
                     TruncationError, cohomology, cohomology_dims,
                     is_quasi_iso_complexes, shifted_dual, suspend)
from .pdual import (PdCertificate, canonical_orientation, is_orientation,
                    is_pd_cdga, kill_orphans_in_degree, orphan_ideal,
                    orphan_profile, pairing_signature, pd_quotient,
                    theta_map)
from .pretty import (PrettyModel, boundary_double, build_pretty_model,
                     shriek, shriek_image_ideal, surjective_quotient_model,
                     verify_pretty_model)

__version__ = "0.1.0"
