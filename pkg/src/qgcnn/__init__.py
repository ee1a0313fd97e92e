"""Graph-convolved images classified by variational circuits on a dense state-vector simulator."""
from .data import Dataset, GeneratorConfig, generate, load, pad_to, save
from .errors import (ConfigError, EncodingError, FormatError, NormalizationError,
                     NumericError, QGCNNError, UsageError)
from .model import (MlpParams, ModelParams, count_parameters, mlp_forward, predict,
                    qgcnn_forward, qgcnn_loss_and_grad)
from .optim import RMSProp
from .train import TrainConfig, evaluate, train

__version__ = "0.1.0"
