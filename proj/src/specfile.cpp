#include "oforge/specfile.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "oforge/errors.hpp"

namespace oforge {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<int> parse_int_list(const std::string& text, int line) {
    std::vector<int> values;
    std::istringstream in(text);
    std::string token;
    while (in >> token) {
        try {
            std::size_t used = 0;
            values.push_back(std::stoi(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw ParseError(line, "expected an integer, got '" + token + "'");
        }
    }
    return values;
}

Permutation parse_cycles(const std::string& text, int degree, int line) {
    std::vector<Point> images(static_cast<std::size_t>(degree));
    std::iota(images.begin(), images.end(), 0);
    std::size_t pos = 0;
    bool any = false;
    while (pos < text.size()) {
        if (std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
            continue;
        }
        if (text[pos] != '(') throw ParseError(line, "expected '(' in cycle notation");
        std::size_t close = text.find(')', pos);
        if (close == std::string::npos) {
            throw ParseError(line, "unterminated cycle '" + text.substr(pos) + "'");
        }
        std::vector<int> cycle = parse_int_list(text.substr(pos + 1, close - pos - 1), line);
        for (int p : cycle) {
            if (p < 0 || p >= degree) {
                throw ParseError(line, "cycle point " + std::to_string(p) + " out of range");
            }
        }
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            Point from = cycle[i];
            Point to = cycle[(i + 1) % cycle.size()];
            if (images[static_cast<std::size_t>(from)] != from) {
                throw ParseError(line, "point " + std::to_string(from) + " repeated in cycles");
            }
            images[static_cast<std::size_t>(from)] = to;
        }
        pos = close + 1;
        any = true;
    }
    if (!any) throw ParseError(line, "empty permutation literal");
    return Permutation(std::move(images));
}

Permutation parse_permutation_at(const std::string& text, int degree, int line) {
    std::string body = trim(text);
    if (body.empty()) throw ParseError(line, "missing permutation literal");
    if (body.front() == '[') {
        if (body.back() != ']') throw ParseError(line, "unterminated image list");
        std::string inner = body.substr(1, body.size() - 2);
        for (char& c : inner) {
            if (c == ',') c = ' ';
        }
        std::vector<int> images = parse_int_list(inner, line);
        if (static_cast<int>(images.size()) != degree) {
            throw ParseError(line, "image list length does not match the degree");
        }
        try {
            return Permutation(std::move(images));
        } catch (const std::exception& e) {
            throw ParseError(line, e.what());
        }
    }
    return parse_cycles(body, degree, line);
}

struct GroupBlock {
    int degree = -1;
    std::vector<Permutation> generators;
    int line = 0;
};

}  // namespace

Permutation parse_permutation(const std::string& text, int degree) {
    return parse_permutation_at(text, degree, 0);
}

SpecFile parse_spec_text(const std::string& text) {
    std::map<std::string, GroupBlock> groups;
    std::optional<std::string> lobe_group_name;
    std::optional<std::string> vertex_group_name;
    std::optional<Point> delta;
    std::optional<std::pair<Point, Point>> lambda_arc;
    std::vector<std::pair<std::string, std::string>> embeds;  // raw text, resolved later
    std::vector<int> embed_lines;
    Limits limits;

    enum class Section { kNone, kGroup, kAmalgam, kLimits };
    Section section = Section::kNone;
    std::string current_group;
    bool saw_amalgam = false;

    std::istringstream in(text);
    std::string raw_line;
    int line = 0;
    while (std::getline(in, raw_line)) {
        ++line;
        std::string content = raw_line;
        if (auto hash = content.find('#'); hash != std::string::npos) {
            content = content.substr(0, hash);
        }
        content = trim(content);
        if (content.empty()) continue;

        if (section == Section::kNone) {
            if (content.rfind("group ", 0) == 0) {
                std::istringstream header(content.substr(6));
                std::string name;
                std::string brace;
                header >> name >> brace;
                if (name.empty() || brace != "{") throw ParseError(line, "expected 'group <name> {'");
                if (groups.count(name)) throw ParseError(line, "group '" + name + "' redefined");
                groups[name] = GroupBlock{.degree = -1, .generators = {}, .line = line};
                current_group = name;
                section = Section::kGroup;
            } else if (content == "amalgam {") {
                if (saw_amalgam) throw ParseError(line, "amalgam block redefined");
                saw_amalgam = true;
                section = Section::kAmalgam;
            } else if (content == "limits {") {
                section = Section::kLimits;
            } else {
                throw ParseError(line, "unknown directive '" + content + "'");
            }
            continue;
        }

        if (content == "}") {
            section = Section::kNone;
            continue;
        }

        std::istringstream entry(content);
        std::string key;
        entry >> key;
        std::string rest = trim(content.substr(key.size()));

        if (section == Section::kGroup) {
            GroupBlock& block = groups[current_group];
            if (key == "degree") {
                std::vector<int> v = parse_int_list(rest, line);
                if (v.size() != 1 || v[0] <= 0) throw ParseError(line, "bad degree");
                block.degree = v[0];
            } else if (key == "gen") {
                if (block.degree < 0) throw ParseError(line, "degree must come before generators");
                block.generators.push_back(parse_permutation_at(rest, block.degree, line));
            } else {
                throw ParseError(line, "unknown group key '" + key + "'");
            }
        } else if (section == Section::kAmalgam) {
            if (key == "lobe_group") {
                lobe_group_name = rest;
            } else if (key == "vertex_group") {
                vertex_group_name = rest;
            } else if (key == "delta") {
                std::vector<int> v = parse_int_list(rest, line);
                if (v.size() != 1) throw ParseError(line, "bad delta");
                delta = v[0];
            } else if (key == "embed") {
                std::size_t arrow = rest.find("->");
                if (arrow == std::string::npos) {
                    throw ParseError(line, "embed expects '<perm> -> <perm>'");
                }
                embeds.emplace_back(trim(rest.substr(0, arrow)), trim(rest.substr(arrow + 2)));
                embed_lines.push_back(line);
            } else if (key == "lambda_arc") {
                std::vector<int> v = parse_int_list(rest, line);
                if (v.size() != 2) throw ParseError(line, "lambda_arc expects two points");
                lambda_arc = {v[0], v[1]};
            } else {
                throw ParseError(line, "unknown amalgam key '" + key + "'");
            }
        } else if (section == Section::kLimits) {
            if (key == "max_vertices") {
                std::vector<int> v = parse_int_list(rest, line);
                if (v.size() != 1 || v[0] <= 0) throw ParseError(line, "bad max_vertices");
                limits.max_vertices = static_cast<std::size_t>(v[0]);
            } else if (key == "max_radius") {
                std::vector<int> v = parse_int_list(rest, line);
                if (v.size() != 1 || v[0] <= 0) throw ParseError(line, "bad max_radius");
                limits.max_radius = v[0];
            } else {
                throw ParseError(line, "unknown limits key '" + key + "'");
            }
        }
    }
    if (section != Section::kNone) throw ParseError(line, "unterminated block");
    if (!saw_amalgam) throw ParseError(line, "missing amalgam block");
    if (!lobe_group_name || !groups.count(*lobe_group_name)) {
        throw ParseError(line, "amalgam lobe_group is missing or undefined");
    }
    if (!vertex_group_name || !groups.count(*vertex_group_name)) {
        throw ParseError(line, "amalgam vertex_group is missing or undefined");
    }
    if (!delta) throw ParseError(line, "amalgam delta is missing");
    if (!lambda_arc) throw ParseError(line, "amalgam lambda_arc is missing");

    const GroupBlock& p_block = groups.at(*lobe_group_name);
    const GroupBlock& a_block = groups.at(*vertex_group_name);
    if (p_block.degree < 0) throw ParseError(p_block.line, "group has no degree");
    if (a_block.degree < 0) throw ParseError(a_block.line, "group has no degree");

    std::vector<Permutation> edge_gens;
    std::vector<std::pair<Permutation, Permutation>> embedding;
    for (std::size_t i = 0; i < embeds.size(); ++i) {
        Permutation h = parse_permutation_at(embeds[i].first, p_block.degree, embed_lines[i]);
        Permutation img = parse_permutation_at(embeds[i].second, a_block.degree, embed_lines[i]);
        edge_gens.push_back(h);
        embedding.emplace_back(std::move(h), std::move(img));
    }

    SpecFile result{
        AmalgamSpec{FiniteGroup(p_block.degree, p_block.generators), *delta, std::move(edge_gens),
                    FiniteGroup(a_block.degree, a_block.generators), std::move(embedding),
                    *lambda_arc},
        limits, text};
    return result;
}

SpecFile parse_spec_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_spec_text(buffer.str());
}

}  // namespace oforge
