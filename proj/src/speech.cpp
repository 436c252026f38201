#include "affect/rap.hpp"

#include "affect/text.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <sstream>

namespace affect {

void EmotionDictionary::add(Emotion emotion, std::string_view phrase) {
    if (emotion == Emotion::Neutral) throw ValidationError("Neutral cannot carry dictionary entries");
    auto normalized = text::normalize_phrase(phrase);
    if (normalized.empty()) throw ValidationError("empty dictionary entry");
    if (auto it = index_.find(normalized); it != index_.end()) {
        if (it->second == emotion) return;
        throw DuplicateWord("'" + normalized + "' listed under both " + std::string(to_string(it->second)) +
                            " and " + std::string(to_string(emotion)));
    }
    max_words_ = std::max(max_words_, text::split(normalized, ' ').size());
    by_emotion_[index_of(emotion)].insert(normalized);
    index_.emplace(std::move(normalized), emotion);
}

std::optional<Emotion> EmotionDictionary::lookup(std::string_view normalized_phrase) const {
    if (auto it = index_.find(normalized_phrase); it != index_.end()) return it->second;
    return std::nullopt;
}

const std::set<std::string>& EmotionDictionary::words(Emotion emotion) const {
    return by_emotion_[index_of(emotion)];
}

EmotionDictionary parse_dictionary(std::string_view xml, const std::string& origin) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in{std::string(xml)};
    try {
        pt::read_xml(in, tree, pt::xml_parser::no_comments);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError(origin, e.line(), e.message());
    }

    const auto root = tree.get_child_optional("dictionary");
    if (!root) throw ParseError(origin, 0, "missing <dictionary> root element");

    EmotionDictionary dict;
    for (const auto& [tag, node] : *root) {
        if (tag == "<xmlattr>") continue;
        if (tag != "emotion") throw ParseError(origin, 0, "unexpected element <" + tag + ">");
        const auto name = node.get<std::string>("<xmlattr>.name", "");
        const auto emotion = parse_emotion(name);
        if (!emotion || *emotion == Emotion::Neutral) {
            throw ParseError(origin, 0, "unknown emotion name '" + name + "'");
        }
        for (const auto& [word_tag, word] : node) {
            if (word_tag == "<xmlattr>") continue;
            if (word_tag != "word") {
                throw ParseError(origin, 0, "unexpected element <" + word_tag + "> in emotion " + name);
            }
            try {
                dict.add(*emotion, word.data());
            } catch (const ValidationError& e) {
                throw ParseError(origin, 0, e.what());
            }
        }
    }
    return dict;
}

EmotionDictionary load_dictionary(const std::filesystem::path& path) {
    return parse_dictionary(read_file(path), path.string());
}

ModalityPrediction classify_speech(const SpeechToken& token, const EmotionDictionary& dict) {
    ModalityPrediction p;
    p.modality = Modality::Speech;
    p.window_start = token.ts;
    p.window_end = token.ts;

    const auto words = text::split(text::normalize_phrase(token.text), ' ');
    const std::size_t longest = std::min(words.size(), dict.max_phrase_words());
    for (std::size_t n = longest; n >= 1; --n) {
        for (std::size_t start = 0; start + n <= words.size(); ++start) {
            std::string phrase = words[start];
            for (std::size_t k = 1; k < n; ++k) phrase += ' ' + words[start + k];
            if (auto hit = dict.lookup(phrase)) {
                p.emotion = *hit;
                p.fired_rule = Rule::DictionaryHit;
                return p;
            }
        }
    }
    return p;
}

}  // namespace affect
