from .base import FeatureMap
from .processors import FEATURE_MAPS, AppendConstant, IdentityMap, RandomFourierFeatures, make_feature_map
