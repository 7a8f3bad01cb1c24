#include <mutex>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/core/utils/logger.hpp>
#include <opencv2/dnn.hpp>

#include "backend/backend.hpp"
#include "backend/clip_tokenizer.hpp"
#include "core/errors.hpp"
#include "prompts/prompt_engine.hpp"

namespace madp {
namespace {

namespace fs = std::filesystem;

cv::dnn::Net load_graph(const fs::path& path) {
  if (!fs::exists(path)) {
    fail(ErrorCode::BackendUnavailable, "missing encoder graph '" + path.string() + "'");
  }
  try {
    cv::dnn::Net net = cv::dnn::readNetFromONNX(path.string());
    if (net.empty()) fail(ErrorCode::BackendUnavailable, "empty graph '" + path.string() + "'");
    net.setPreferableBackend(cv::dnn::DNN_BACKEND_OPENCV);
    net.setPreferableTarget(cv::dnn::DNN_TARGET_CPU);
    return net;
  } catch (const cv::Exception& e) {
    fail(ErrorCode::BackendUnavailable,
         "cannot load encoder graph '" + path.string() + "': " + e.what());
  }
}

Embedding run_graph(cv::dnn::Net& net, const cv::Mat& input, const char* what) {
  cv::Mat out;
  try {
    net.setInput(input);
    out = net.forward();
  } catch (const cv::Exception& e) {
    fail(ErrorCode::BackendUnavailable, std::string(what) + " encoder failed: " + e.what());
  }
  if (out.empty() || out.depth() != CV_32F) {
    fail(ErrorCode::BackendUnavailable, std::string(what) + " encoder produced no float output");
  }
  if (!out.isContinuous()) out = out.clone();
  // [1, D] or [D]; anything with more than one row is not an embedding.
  const std::size_t total = out.total();
  if (out.dims >= 2 && out.size[0] != 1) {
    fail(ErrorCode::BackendUnavailable, std::string(what) + " encoder output has batch != 1");
  }
  const float* p = out.ptr<float>();
  return Embedding::from_floats(std::span<const float>(p, total));
}

class NeuralBackend final : public EmbeddingBackend {
 public:
  explicit NeuralBackend(const fs::path& dir)
      : source_(dir),
        tokenizer_(ClipTokenizer::from_file(dir / "tokenizer.json")),
        image_net_(load_graph(dir / "image_encoder.onnx")),
        text_net_(load_graph(dir / "text_encoder.onnx")) {
    // every shipped prompt must fit the encoder context
    for (const std::string& prompt : all_shipped_prompts()) tokenizer_.encode(prompt);

    const Embedding probe_image = embed_image(PixelTensor::filled(kEncoderInputSize,
                                                                  kEncoderInputSize, 0.0f));
    const Embedding probe_text = embed_text("bona-fide presentation.");
    if (probe_image.dim() != probe_text.dim()) {
      fail(ErrorCode::Config, "image encoder dim " + std::to_string(probe_image.dim()) +
                                  " differs from text encoder dim " +
                                  std::to_string(probe_text.dim()));
    }
    dim_ = probe_image.dim();
  }

  BackendDescriptor descriptor() const override {
    return {BackendKind::NeuralRuntime, source_, dim_};
  }

  Embedding embed_image(const PixelTensor& tensor) const override {
    if (tensor.height() != kEncoderInputSize || tensor.width() != kEncoderInputSize) {
      fail(ErrorCode::InvalidArgument, "image encoder expects a 3x224x224 tensor");
    }
    const int shape[] = {1, 3, kEncoderInputSize, kEncoderInputSize};
    cv::Mat blob(4, shape, CV_32F, const_cast<float*>(tensor.data().data()));
    std::lock_guard lock(mutex_);
    return run_graph(image_net_, blob, "image");
  }

  Embedding embed_image(std::string_view sample_id) const override {
    fail(ErrorCode::KeyMissing, "neural backend has no keyed embedding for '" +
                                    std::string(sample_id) + "'");
  }

  bool keyed_images() const noexcept override { return false; }

  Embedding embed_text(std::string_view prompt) const override {
    if (prompt.empty()) fail(ErrorCode::InvalidArgument, "prompt must be non-empty");
    const auto ids = tokenizer_.encode_padded(prompt);
    // the DNN runtime takes float blobs; token ids are far below 2^24
    const int shape[] = {1, static_cast<int>(ids.size())};
    cv::Mat blob(2, shape, CV_32F);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      blob.ptr<float>()[i] = static_cast<float>(ids[i]);
    }
    std::lock_guard lock(mutex_);
    return run_graph(text_net_, blob, "text");
  }

 private:
  fs::path source_;
  ClipTokenizer tokenizer_;
  std::size_t dim_ = 0;
  mutable std::mutex mutex_;
  mutable cv::dnn::Net image_net_;
  mutable cv::dnn::Net text_net_;
};

}  // namespace

std::unique_ptr<EmbeddingBackend> open_neural_backend(const std::filesystem::path& directory) {
  if (!fs::is_directory(directory)) {
    fail(ErrorCode::BackendUnavailable, "backend directory '" + directory.string() +
                                            "' does not exist");
  }
  cv::utils::logging::setLogLevel(cv::utils::logging::LOG_LEVEL_SILENT);
  return std::make_unique<NeuralBackend>(directory);
}

}  // namespace madp
