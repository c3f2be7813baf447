"""Clause-then-sentence sentiment classification on a small NumPy
autodiff core, with dictionary-driven rho-hot categorical embeddings and
an unsupervised lexicon-rule baseline."""

from .baseline import lex_rule_classify, lex_rule_score
from .corpus import (LABELS, Dataset, RawSample, aggregate_labels, load_dataset,
                     split_clauses, tokenize)
from .encoding import RhoHotFamily, one_hot, rho_hot
from .errors import (CheckpointError, ConfigError, DataError, DivergenceError,
                     LexsentError, NumericError, OracleError, ShapeError)
from .gradcheck import check_gradients, finite_diff_grad, relative_error
from .lexicon import (ConjunctionLexicon, KeyWordLexicon, Lexicons, PosLexicon,
                      TokenAnnotation, attach_lexicon, conjunction_embed,
                      keyword_embed, load_lexicons, pos_embed)
from .network import (Level1Model, Level2Model, TrainConfig, distill_clauses,
                      evaluate_level1, evaluate_two_level, predict,
                      train_level1, train_level2)
from .tensor import Parameter, Tensor, activation, affine, sigmoid, softmax, tanh

__version__ = "0.1.0"
