#include "auxst/model.h"

#include <array>
#include <charconv>
#include <cstdio>
#include <stdexcept>

#include "auxst/errors.h"
#include "auxst/random.h"

namespace auxst {

namespace {

constexpr std::array<char, 4> kGates = {'i', 'f', 'o', 'g'};
constexpr std::array<const char*, 4> kLstms = {"char.fwd", "char.bwd", "word.fwd",
                                               "word.bwd"};
constexpr std::string_view kFormat = "auxst-model";
constexpr int kFormatVersion = 1;

std::string gate_name(std::string_view prefix, char kind, char gate) {
  std::string name(prefix);
  name += '.';
  name += kind;
  name += '_';
  name += gate;
  return name;
}

void init_uniform(Tensor& t, Rng& rng) {
  for (double& v : t.values()) v = uniform_real(rng, -0.1, 0.1);
}

struct LstmNodes {
  std::array<NodeRef, 4> W, U, b;
};

LstmNodes lstm_nodes(Graph& graph, const ModelParams& params, std::string_view prefix) {
  LstmNodes n;
  for (std::size_t k = 0; k < 4; ++k) {
    n.W[k] = graph.parameter(params.tensor(gate_name(prefix, 'W', kGates[k])));
    n.U[k] = graph.parameter(params.tensor(gate_name(prefix, 'U', kGates[k])));
    n.b[k] = graph.parameter(params.tensor(gate_name(prefix, 'b', kGates[k])));
  }
  return n;
}

// Runs a standard LSTM (no peepholes) over `inputs` in the given order and
// returns the hidden state after each step.
std::vector<NodeRef> run_lstm(Graph& graph, const LstmNodes& w, std::size_t hidden,
                              std::span<const NodeRef> inputs, bool reverse) {
  NodeRef h = graph.input(Tensor({hidden}));
  NodeRef c = graph.input(Tensor({hidden}));
  std::vector<NodeRef> states(inputs.size());
  for (std::size_t step = 0; step < inputs.size(); ++step) {
    const std::size_t pos = reverse ? inputs.size() - 1 - step : step;
    const NodeRef x = inputs[pos];
    std::array<NodeRef, 4> pre;
    for (std::size_t k = 0; k < 4; ++k) {
      pre[k] = graph.add({graph.matvec(w.W[k], x), graph.matvec(w.U[k], h), w.b[k]});
    }
    const NodeRef in_gate = graph.sigmoid(pre[0]);
    const NodeRef forget = graph.sigmoid(pre[1]);
    const NodeRef out_gate = graph.sigmoid(pre[2]);
    const NodeRef candidate = graph.tanh(pre[3]);
    c = graph.add({graph.hadamard(forget, c), graph.hadamard(in_gate, candidate)});
    h = graph.hadamard(out_gate, graph.tanh(c));
    states[pos] = h;
  }
  return states;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Line cursor over the serialized model.
class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::string_view line() {
    if (pos_ >= text_.size()) fail("unexpected end of model file");
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    std::string_view out = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_no_;
    return out;
  }

  std::vector<std::string_view> fields() {
    std::string_view l = line();
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= l.size()) {
      std::size_t end = l.find(' ', start);
      if (end == std::string_view::npos) end = l.size();
      if (end > start) out.push_back(l.substr(start, end - start));
      start = end + 1;
    }
    return out;
  }

  std::vector<std::string_view> expect(std::string_view keyword, std::size_t count) {
    auto f = fields();
    if (f.size() != count || f[0] != keyword) {
      fail("expected '" + std::string(keyword) + "' record");
    }
    return f;
  }

  template <typename T>
  T number(std::string_view s) {
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      fail("malformed number '" + std::string(s) + "'");
    }
    return value;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("model file line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

}  // namespace

std::string head_weight_name(std::string_view task) {
  return "head." + std::string(task) + ".W";
}

std::string head_bias_name(std::string_view task) {
  return "head." + std::string(task) + ".b";
}

ModelParams::ModelParams(ModelDims dims, Vocabulary vocab, std::vector<TaskSpec> tasks,
                         std::uint64_t seed)
    : dims_(dims), vocab_(std::move(vocab)) {
  if (dims_.word_dim == 0 || dims_.char_dim == 0 || dims_.char_hidden == 0 ||
      dims_.word_hidden == 0) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  tensors_.emplace("embed.word", Tensor({vocab_.word_count(), dims_.word_dim}));
  tensors_.emplace("embed.char", Tensor({vocab_.char_count(), dims_.char_dim}));
  for (const char* prefix : kLstms) {
    const bool is_char = std::string_view(prefix).starts_with("char");
    const std::size_t h = is_char ? dims_.char_hidden : dims_.word_hidden;
    const std::size_t in = is_char ? dims_.char_dim : dims_.word_repr_dim();
    for (char gate : kGates) {
      tensors_.emplace(gate_name(prefix, 'W', gate), Tensor({h, in}));
      tensors_.emplace(gate_name(prefix, 'U', gate), Tensor({h, h}));
      tensors_.emplace(gate_name(prefix, 'b', gate), Tensor({h}));
    }
  }
  Rng rng(seed);
  for (auto& [name, t] : tensors_) {
    if (name.find(".b_") != std::string::npos) {
      t.fill(name.ends_with("_f") ? 1.0 : 0.0);
    } else {
      init_uniform(t, rng);
    }
  }
  for (auto& task : tasks) {
    const std::uint64_t head_seed = mix_seed(seed, "head." + task.name());
    add_task(std::move(task), head_seed);
  }
}

const TaskSpec* ModelParams::find_task(std::string_view name) const {
  for (const auto& t : tasks_) {
    if (t.name() == name) return &t;
  }
  return nullptr;
}

const TaskSpec& ModelParams::task(std::string_view name) const {
  if (const TaskSpec* t = find_task(name)) return *t;
  std::string known;
  for (const auto& t : tasks_) known += (known.empty() ? "" : ", ") + t.name();
  throw std::invalid_argument("task '" + std::string(name) +
                              "' is not registered in the model (available: " + known +
                              ")");
}

void ModelParams::add_task(TaskSpec task, std::uint64_t seed) {
  if (find_task(task.name())) {
    throw std::invalid_argument("task '" + task.name() + "' already registered");
  }
  init_head(task, seed);
  tasks_.push_back(std::move(task));
}

void ModelParams::init_head(const TaskSpec& task, std::uint64_t seed) {
  Rng rng(seed);
  Tensor w({task.size(), dims_.context_dim()});
  init_uniform(w, rng);
  tensors_.insert_or_assign(head_weight_name(task.name()), std::move(w));
  tensors_.insert_or_assign(head_bias_name(task.name()), Tensor({task.size()}));
}

Tensor& ModelParams::tensor(std::string_view name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) {
    throw std::out_of_range("no parameter tensor named '" + std::string(name) + "'");
  }
  return it->second;
}

const Tensor& ModelParams::tensor(std::string_view name) const {
  return const_cast<ModelParams*>(this)->tensor(name);
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : tensors_) n += t.size();
  return n;
}

void ModelParams::fill(double value) {
  for (auto& [name, t] : tensors_) t.fill(value);
}

std::string ModelParams::serialize() const {
  std::string out;
  out += std::string(kFormat) + " " + std::to_string(kFormatVersion) + "\n";
  out += "dims " + std::to_string(dims_.word_dim) + " " + std::to_string(dims_.char_dim) +
         " " + std::to_string(dims_.char_hidden) + " " +
         std::to_string(dims_.word_hidden) + "\n";
  out += "words " + std::to_string(vocab_.words().size()) + "\n";
  for (const auto& w : vocab_.words()) out += w + "\n";
  out += "chars " + std::to_string(vocab_.chars().size()) + "\n";
  for (const auto& c : vocab_.chars()) out += c + "\n";
  out += "tasks " + std::to_string(tasks_.size()) + "\n";
  for (const auto& t : tasks_) {
    out += "task " + t.name() + " " + std::string(role_name(t.role())) + " " +
           std::to_string(t.size()) + "\n";
    for (const auto& label : t.tagset()) out += label + "\n";
  }
  out += "tensors " + std::to_string(tensors_.size()) + "\n";
  for (const auto& [name, t] : tensors_) {
    out += "tensor " + name + " " + std::to_string(t.rank());
    for (std::size_t d : t.shape()) out += " " + std::to_string(d);
    out += "\n";
    const std::size_t cols = t.rank() == 2 ? t.cols() : t.size();
    for (std::size_t i = 0; i < t.size(); ++i) {
      out += format_double(t[i]);
      out += (i + 1) % cols == 0 ? '\n' : ' ';
    }
  }
  return out;
}

ModelParams ModelParams::deserialize(std::string_view text) {
  Reader in(text);
  auto header = in.expect(kFormat, 2);
  if (in.number<int>(header[1]) != kFormatVersion) {
    in.fail("unsupported format version " + std::string(header[1]));
  }
  ModelParams m;
  auto dims = in.expect("dims", 5);
  m.dims_ = {in.number<std::size_t>(dims[1]), in.number<std::size_t>(dims[2]),
             in.number<std::size_t>(dims[3]), in.number<std::size_t>(dims[4])};

  auto read_list = [&](std::string_view keyword) {
    auto head = in.expect(keyword, 2);
    const auto n = in.number<std::size_t>(head[1]);
    std::vector<std::string> items;
    items.reserve(n);
    for (std::size_t i = 0; i < n; ++i) items.emplace_back(in.line());
    return items;
  };
  auto words = read_list("words");
  auto chars = read_list("chars");
  m.vocab_ = Vocabulary(std::move(words), std::move(chars));

  auto task_head = in.expect("tasks", 2);
  const auto n_tasks = in.number<std::size_t>(task_head[1]);
  for (std::size_t k = 0; k < n_tasks; ++k) {
    auto rec = in.expect("task", 4);
    const auto n_labels = in.number<std::size_t>(rec[3]);
    std::vector<std::string> tags;
    for (std::size_t i = 0; i < n_labels; ++i) tags.emplace_back(in.line());
    m.tasks_.emplace_back(std::string(rec[1]), std::move(tags), parse_role(rec[2]));
  }

  auto tensor_head = in.expect("tensors", 2);
  const auto n_tensors = in.number<std::size_t>(tensor_head[1]);
  for (std::size_t k = 0; k < n_tensors; ++k) {
    auto rec = in.fields();
    if (rec.size() < 3 || rec[0] != "tensor") in.fail("expected 'tensor' record");
    const auto rank = in.number<std::size_t>(rec[2]);
    if (rec.size() != 3 + rank) in.fail("tensor shape does not match its rank");
    Tensor::Shape shape;
    for (std::size_t d = 0; d < rank; ++d) shape.push_back(in.number<std::size_t>(rec[3 + d]));
    Tensor t(shape);
    std::size_t filled = 0;
    while (filled < t.size()) {
      for (auto field : in.fields()) {
        if (filled == t.size()) in.fail("too many values for tensor " + std::string(rec[1]));
        t[filled++] = in.number<double>(field);
      }
    }
    m.tensors_.emplace(std::string(rec[1]), std::move(t));
  }

  // Shape consistency against dims, vocabulary and tagsets.
  ModelParams reference(m.dims_, m.vocab_, m.tasks_, 0);
  for (const auto& [name, t] : reference.tensors_) {
    auto it = m.tensors_.find(name);
    if (it == m.tensors_.end()) throw DataError("model file lacks tensor " + name);
    if (!it->second.same_shape(t)) {
      throw DataError("model tensor " + name + " has shape " +
                      it->second.shape_string() + ", expected " + t.shape_string());
    }
  }
  if (m.tensors_.size() != reference.tensors_.size()) {
    throw DataError("model file has unexpected extra tensors");
  }
  return m;
}

NodeRef encode_word(Graph& graph, const ModelParams& params, std::string_view word,
                    bool drop_word) {
  if (word.empty()) throw std::invalid_argument("encode_word: empty word");
  const ModelDims& d = params.dims();
  const Vocabulary& vocab = params.vocab();
  const NodeRef char_table = graph.parameter(params.tensor("embed.char"));
  std::vector<NodeRef> chars;
  for (const auto& ch : split_chars(word)) {
    chars.push_back(graph.lookup(char_table, vocab.char_index(ch)));
  }
  const auto fwd = run_lstm(graph, lstm_nodes(graph, params, "char.fwd"), d.char_hidden,
                            chars, false);
  const auto bwd = run_lstm(graph, lstm_nodes(graph, params, "char.bwd"), d.char_hidden,
                            chars, true);
  const std::size_t row = drop_word ? Vocabulary::kUnknown : vocab.word_index(word);
  const NodeRef embedding = graph.lookup(graph.parameter(params.tensor("embed.word")), row);
  return graph.concat({embedding, fwd.back(), bwd.front()});
}

std::vector<NodeRef> encode_sentence(Graph& graph, const ModelParams& params,
                                     std::span<const std::string> tokens,
                                     std::span<const std::uint8_t> dropped) {
  if (tokens.empty()) throw std::invalid_argument("encode_sentence: empty sentence");
  if (!dropped.empty() && dropped.size() != tokens.size()) {
    throw std::invalid_argument("encode_sentence: dropout mask length mismatch");
  }
  std::vector<NodeRef> words;
  words.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    words.push_back(encode_word(graph, params, tokens[i], !dropped.empty() && dropped[i]));
  }
  const std::size_t h = params.dims().word_hidden;
  const auto fwd = run_lstm(graph, lstm_nodes(graph, params, "word.fwd"), h, words, false);
  const auto bwd = run_lstm(graph, lstm_nodes(graph, params, "word.bwd"), h, words, true);
  std::vector<NodeRef> contexts;
  contexts.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    contexts.push_back(graph.concat({fwd[i], bwd[i]}));
  }
  return contexts;
}

std::vector<NodeRef> task_logits(Graph& graph, const ModelParams& params,
                                 std::span<const NodeRef> contexts, const TaskSpec& task) {
  const NodeRef w = graph.parameter(params.tensor(head_weight_name(task.name())));
  const NodeRef b = graph.parameter(params.tensor(head_bias_name(task.name())));
  std::vector<NodeRef> logits;
  logits.reserve(contexts.size());
  for (NodeRef c : contexts) logits.push_back(graph.add({graph.matvec(w, c), b}));
  return logits;
}

NodeRef sentence_loss(Graph& graph, const ModelParams& params,
                      std::span<const std::string> tokens,
                      std::span<const std::string> gold, std::string_view task,
                      std::span<const std::uint8_t> dropped) {
  const TaskSpec& spec = params.task(task);
  if (gold.size() != tokens.size()) {
    throw std::invalid_argument("sentence_loss: " + std::to_string(gold.size()) +
                                " labels for " + std::to_string(tokens.size()) +
                                " tokens");
  }
  std::vector<std::size_t> gold_ids;
  gold_ids.reserve(gold.size());
  for (const auto& label : gold) {
    auto id = spec.index_of(label);
    if (!id) {
      throw DataError("label '" + label + "' is not in the tagset of task '" +
                      spec.name() + "'");
    }
    gold_ids.push_back(*id);
  }
  const auto contexts = encode_sentence(graph, params, tokens, dropped);
  const auto logits = task_logits(graph, params, contexts, spec);
  std::vector<NodeRef> losses;
  losses.reserve(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    losses.push_back(graph.softmax_xent(logits[i], gold_ids[i]));
  }
  return losses.size() == 1 ? losses[0] : graph.add(losses);
}

Tensor encode_word(const ModelParams& params, std::string_view word) {
  Graph graph;
  return graph.value(encode_word(graph, params, word));
}

std::vector<Tensor> encode_sentence(const ModelParams& params,
                                    std::span<const std::string> tokens) {
  Graph graph;
  std::vector<Tensor> out;
  for (NodeRef n : encode_sentence(graph, params, tokens)) out.push_back(graph.value(n));
  return out;
}

std::vector<TokenPrediction> predict(const ModelParams& params,
                                     std::span<const std::string> tokens,
                                     std::string_view task) {
  const TaskSpec& spec = params.task(task);
  Graph graph;
  const auto contexts = encode_sentence(graph, params, tokens);
  const auto logits = task_logits(graph, params, contexts, spec);
  std::vector<TokenPrediction> out;
  out.reserve(logits.size());
  for (NodeRef n : logits) {
    const Tensor& z = graph.value(n);
    TokenPrediction p;
    for (std::size_t k = 1; k < z.size(); ++k) {
      if (z[k] > z[p.index]) p.index = k;
    }
    p.label = spec.label(p.index);
    p.distribution = softmax(z.values());
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::string> predict_labels(const ModelParams& params,
                                        std::span<const std::string> tokens,
                                        std::string_view task) {
  std::vector<std::string> labels;
  for (auto& p : predict(params, tokens, task)) labels.push_back(std::move(p.label));
  return labels;
}

double sentence_loss(const ModelParams& params, std::span<const std::string> tokens,
                     std::span<const std::string> gold, std::string_view task) {
  Graph graph;
  return graph.value(sentence_loss(graph, params, tokens, gold, task)).item();
}

Corpus tag_corpus(const ModelParams& params, const Corpus& corpus, std::string_view task) {
  params.task(task);
  Corpus out(corpus.id());
  for (const auto& s : corpus.sentences()) {
    Sentence tagged = s;
    tagged.labels.insert_or_assign(std::string(task), predict_labels(params, s.tokens, task));
    out.add(std::move(tagged));
  }
  return out;
}

}  // namespace auxst
