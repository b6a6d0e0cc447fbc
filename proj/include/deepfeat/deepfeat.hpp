#pragma once

#include "deepfeat/core/binary_io.hpp"
#include "deepfeat/core/error.hpp"
#include "deepfeat/core/matrix.hpp"
#include "deepfeat/core/parallel.hpp"
#include "deepfeat/core/random.hpp"
#include "deepfeat/ensemble/pool.hpp"
#include "deepfeat/ensemble/sffs.hpp"
#include "deepfeat/eval/accuracy.hpp"
#include "deepfeat/eval/cross_validation.hpp"
#include "deepfeat/eval/report.hpp"
#include "deepfeat/eval/row_spec.hpp"
#include "deepfeat/eval/wilcoxon.hpp"
#include "deepfeat/pipeline/commands.hpp"
#include "deepfeat/pipeline/config.hpp"
#include "deepfeat/reducers/chi2.hpp"
#include "deepfeat/reducers/cooc.hpp"
#include "deepfeat/reducers/dct.hpp"
#include "deepfeat/reducers/global_pooling.hpp"
#include "deepfeat/reducers/layer_selection.hpp"
#include "deepfeat/reducers/lbp.hpp"
#include "deepfeat/reducers/pca.hpp"
#include "deepfeat/reducers/reducer_io.hpp"
#include "deepfeat/reducers/reduction.hpp"
#include "deepfeat/svm/linear_svm.hpp"
#include "deepfeat/svm/model_io.hpp"
#include "deepfeat/svm/multiclass.hpp"
#include "deepfeat/svm/standardize.hpp"
#include "deepfeat/tensor/activation_tensor.hpp"
#include "deepfeat/tensor/folds.hpp"
#include "deepfeat/tensor/manifest.hpp"
#include "deepfeat/tensor/tensor_file.hpp"
