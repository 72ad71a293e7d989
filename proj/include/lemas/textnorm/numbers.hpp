// SPDX-License-Identifier: Apache-2.0
#pragma once

// Cardinal number expansion, 0..999,999, for the ten supported rule tables.
// Larger values (and digit runs with a leading zero) are read digit by
// digit. Multi-word numbers use spaces instead of hyphens so that every
// word survives punctuation filtering.

#include <cstdint>
#include <string>
#include <string_view>

#include "lemas/error.hpp"

namespace lemas::numbers {

inline constexpr uint32_t kMaxCardinal = 999'999;

namespace detail {

inline std::string join(std::string a, std::string_view sep, std::string_view b) {
  if (a.empty()) return std::string(b);
  if (b.empty()) return a;
  a += sep;
  a += b;
  return a;
}

inline bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// ---- English
inline const char* const kEnUnits[] = {"zero",    "one",     "two",      "three",    "four",
                                       "five",    "six",     "seven",    "eight",    "nine",
                                       "ten",     "eleven",  "twelve",   "thirteen", "fourteen",
                                       "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};
inline const char* const kEnTens[] = {"", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"};

inline std::string en_below100(uint32_t n) {
  if (n < 20) return kEnUnits[n];
  return join(kEnTens[n / 10], " ", n % 10 ? kEnUnits[n % 10] : "");
}
inline std::string en_below1000(uint32_t n) {
  std::string out;
  if (n / 100) out = std::string(kEnUnits[n / 100]) + " hundred";
  if (n % 100) out = join(out, " ", en_below100(n % 100));
  return out;
}
inline std::string en(uint32_t n) {
  if (n == 0) return "zero";
  std::string out;
  if (n / 1000) out = en_below1000(n / 1000) + " thousand";
  if (n % 1000) out = join(out, " ", en_below1000(n % 1000));
  return out;
}

// ---- German (compounds written solid)
inline const char* const kDeUnits[] = {"null",     "eins",     "zwei",     "drei",     "vier",
                                       "fünf",     "sechs",    "sieben",   "acht",     "neun",
                                       "zehn",     "elf",      "zwölf",    "dreizehn", "vierzehn",
                                       "fünfzehn", "sechzehn", "siebzehn", "achtzehn", "neunzehn"};
inline const char* const kDeTens[] = {"",        "",         "zwanzig",  "dreißig", "vierzig",
                                      "fünfzig", "sechzig",  "siebzig",  "achtzig", "neunzig"};

inline std::string de_below100(uint32_t n, bool final) {
  if (n == 1) return final ? "eins" : "ein";
  if (n < 20) return kDeUnits[n];
  const uint32_t u = n % 10;
  if (!u) return kDeTens[n / 10];
  return std::string(u == 1 ? "ein" : kDeUnits[u]) + "und" + kDeTens[n / 10];
}
inline std::string de_below1000(uint32_t n, bool final) {
  std::string out;
  if (n / 100) out = std::string(n / 100 == 1 ? "ein" : kDeUnits[n / 100]) + "hundert";
  if (n % 100) out += de_below100(n % 100, final);
  return out;
}
inline std::string de(uint32_t n) {
  if (n == 0) return "null";
  std::string out;
  if (n / 1000) out = de_below1000(n / 1000, false) + "tausend";
  if (n % 1000) out += de_below1000(n % 1000, true);
  return out;
}

// ---- French
inline const char* const kFrUnits[] = {"zéro", "un",     "deux",  "trois",    "quatre", "cinq",
                                       "six",  "sept",   "huit",  "neuf",     "dix",    "onze",
                                       "douze", "treize", "quatorze", "quinze", "seize"};
inline const char* const kFrTens[] = {"", "", "vingt", "trente", "quarante", "cinquante", "soixante"};

inline std::string fr_below100(uint32_t n, bool final) {
  if (n <= 16) return kFrUnits[n];
  if (n < 20) return std::string("dix ") + kFrUnits[n - 10];
  if (n < 70) {
    const uint32_t u = n % 10;
    if (!u) return kFrTens[n / 10];
    if (u == 1) return std::string(kFrTens[n / 10]) + " et un";
    return std::string(kFrTens[n / 10]) + " " + kFrUnits[u];
  }
  if (n < 80) return n == 71 ? "soixante et onze" : "soixante " + fr_below100(n - 60, final);
  if (n == 80) return final ? "quatre vingts" : "quatre vingt";
  return "quatre vingt " + fr_below100(n - 80, final);
}
inline std::string fr_below1000(uint32_t n, bool final) {
  const uint32_t h = n / 100, r = n % 100;
  std::string out;
  if (h == 1)
    out = "cent";
  else if (h > 1)
    out = std::string(kFrUnits[h]) + (r == 0 && final ? " cents" : " cent");
  if (r) out = join(out, " ", fr_below100(r, final));
  return out;
}
inline std::string fr(uint32_t n) {
  if (n == 0) return "zéro";
  std::string out;
  const uint32_t th = n / 1000;
  if (th == 1)
    out = "mille";
  else if (th > 1)
    out = fr_below1000(th, false) + " mille";
  if (n % 1000) out = join(out, " ", fr_below1000(n % 1000, true));
  return out;
}

// ---- Spanish
inline const char* const kEsUnits[] = {
    "cero",       "uno",        "dos",        "tres",        "cuatro",     "cinco",        "seis",
    "siete",      "ocho",       "nueve",      "diez",        "once",       "doce",         "trece",
    "catorce",    "quince",     "dieciséis",  "diecisiete",  "dieciocho",  "diecinueve",   "veinte",
    "veintiuno",  "veintidós",  "veintitrés", "veinticuatro", "veinticinco", "veintiséis", "veintisiete",
    "veintiocho", "veintinueve"};
inline const char* const kEsTens[] = {"",        "",        "",         "treinta", "cuarenta",
                                      "cincuenta", "sesenta", "setenta", "ochenta", "noventa"};
inline const char* const kEsHundreds[] = {"",           "ciento",      "doscientos",   "trescientos", "cuatrocientos",
                                          "quinientos", "seiscientos", "setecientos", "ochocientos", "novecientos"};

inline std::string es_below100(uint32_t n) {
  if (n < 30) return kEsUnits[n];
  return join(kEsTens[n / 10], " y ", n % 10 ? kEsUnits[n % 10] : "");
}
inline std::string es_below1000(uint32_t n) {
  if (n == 100) return "cien";
  std::string out = kEsHundreds[n / 100];
  if (n % 100) out = join(out, " ", es_below100(n % 100));
  return out;
}
inline std::string es(uint32_t n) {
  if (n == 0) return "cero";
  std::string out;
  const uint32_t th = n / 1000;
  if (th == 1) {
    out = "mil";
  } else if (th > 1) {
    out = es_below1000(th);
    if (ends_with(out, "veintiuno"))
      out = out.substr(0, out.size() - 9) + "veintiún";
    else if (ends_with(out, "uno"))
      out.resize(out.size() - 1);
    out += " mil";
  }
  if (n % 1000) out = join(out, " ", es_below1000(n % 1000));
  return out;
}

// ---- Portuguese (Brazilian spellings)
inline const char* const kPtUnits[] = {"zero",    "um",     "dois",      "três",      "quatro",
                                       "cinco",   "seis",   "sete",      "oito",      "nove",
                                       "dez",     "onze",   "doze",      "treze",     "catorze",
                                       "quinze",  "dezesseis", "dezessete", "dezoito", "dezenove"};
inline const char* const kPtTens[] = {"",          "",        "vinte",   "trinta",  "quarenta",
                                      "cinquenta", "sessenta", "setenta", "oitenta", "noventa"};
inline const char* const kPtHundreds[] = {"",           "cento",      "duzentos",   "trezentos", "quatrocentos",
                                          "quinhentos", "seiscentos", "setecentos", "oitocentos", "novecentos"};

inline std::string pt_below100(uint32_t n) {
  if (n < 20) return kPtUnits[n];
  return join(kPtTens[n / 10], " e ", n % 10 ? kPtUnits[n % 10] : "");
}
inline std::string pt_below1000(uint32_t n) {
  if (n == 100) return "cem";
  std::string out = kPtHundreds[n / 100];
  if (n % 100) out = join(out, " e ", pt_below100(n % 100));
  return out;
}
inline std::string pt(uint32_t n) {
  if (n == 0) return "zero";
  std::string out;
  const uint32_t th = n / 1000, r = n % 1000;
  if (th == 1)
    out = "mil";
  else if (th > 1)
    out = pt_below1000(th) + " mil";
  if (r) out = join(out, (th && (r < 100 || r % 100 == 0)) ? " e " : " ", pt_below1000(r));
  return out;
}

// ---- Italian (compounds written solid)
inline const char* const kItUnits[] = {"zero",        "uno",        "due",      "tre",        "quattro",
                                       "cinque",      "sei",        "sette",    "otto",       "nove",
                                       "dieci",       "undici",     "dodici",   "tredici",    "quattordici",
                                       "quindici",    "sedici",     "diciassette", "diciotto", "diciannove"};
inline const char* const kItTens[] = {"",          "",         "venti",   "trenta",  "quaranta",
                                      "cinquanta", "sessanta", "settanta", "ottanta", "novanta"};

inline std::string it_below100(uint32_t n) {
  if (n < 20) return kItUnits[n];
  std::string t = kItTens[n / 10];
  const uint32_t u = n % 10;
  if (!u) return t;
  if (u == 1 || u == 8) t.pop_back();
  return t + kItUnits[u];
}
inline std::string it_below1000(uint32_t n) {
  const uint32_t h = n / 100, r = n % 100;
  std::string out;
  if (h) out = h == 1 ? "cento" : std::string(kItUnits[h]) + "cento";
  if (r) {
    std::string rest = it_below100(r);
    if (h && rest.front() == 'o') out.pop_back();
    out += rest;
  }
  return out;
}
inline std::string it(uint32_t n) {
  if (n == 0) return "zero";
  std::string out;
  const uint32_t th = n / 1000;
  if (th == 1)
    out = "mille";
  else if (th > 1)
    out = it_below1000(th) + "mila";
  if (n % 1000) out += it_below1000(n % 1000);
  if (n > 3 && ends_with(out, "tre")) {
    out.pop_back();
    out += "é";
  }
  return out;
}

// ---- Russian
inline const char* const kRuUnits[] = {"ноль",       "один",       "два",         "три",         "четыре",
                                       "пять",       "шесть",      "семь",        "восемь",      "девять",
                                       "десять",     "одиннадцать", "двенадцать", "тринадцать",  "четырнадцать",
                                       "пятнадцать", "шестнадцать", "семнадцать", "восемнадцать", "девятнадцать"};
inline const char* const kRuTens[] = {"",          "",           "двадцать",    "тридцать",   "сорок",
                                      "пятьдесят", "шестьдесят", "семьдесят",   "восемьдесят", "девяносто"};
inline const char* const kRuHundreds[] = {"",        "сто",      "двести",   "триста",    "четыреста",
                                          "пятьсот", "шестьсот", "семьсот", "восемьсот", "девятьсот"};

inline std::string ru_unit(uint32_t u, bool feminine) {
  if (feminine && u == 1) return "одна";
  if (feminine && u == 2) return "две";
  return kRuUnits[u];
}
inline std::string ru_below1000(uint32_t n, bool feminine) {
  std::string out = kRuHundreds[n / 100];
  const uint32_t r = n % 100;
  if (r >= 10 && r < 20) return join(out, " ", kRuUnits[r]);
  if (r >= 20) out = join(out, " ", kRuTens[r / 10]);
  if (r % 10) out = join(out, " ", ru_unit(r % 10, feminine));
  return out;
}
inline std::string ru(uint32_t n) {
  if (n == 0) return "ноль";
  std::string out;
  const uint32_t th = n / 1000;
  if (th == 1) {
    out = "тысяча";
  } else if (th > 1) {
    const uint32_t last2 = th % 100, last = th % 10;
    const char* noun = (last2 >= 11 && last2 <= 14) ? "тысяч" : last == 1 ? "тысяча" : (last >= 2 && last <= 4) ? "тысячи" : "тысяч";
    out = ru_below1000(th, true) + " " + noun;
  }
  if (n % 1000) out = join(out, " ", ru_below1000(n % 1000, false));
  return out;
}

// ---- Indonesian
inline const char* const kIdUnits[] = {"nol", "satu", "dua", "tiga", "empat", "lima", "enam", "tujuh", "delapan", "sembilan"};

inline std::string id_below100(uint32_t n) {
  if (n < 10) return kIdUnits[n];
  if (n == 10) return "sepuluh";
  if (n == 11) return "sebelas";
  if (n < 20) return std::string(kIdUnits[n - 10]) + " belas";
  return join(std::string(kIdUnits[n / 10]) + " puluh", " ", n % 10 ? kIdUnits[n % 10] : "");
}
inline std::string id_below1000(uint32_t n) {
  std::string out;
  const uint32_t h = n / 100;
  if (h == 1)
    out = "seratus";
  else if (h > 1)
    out = std::string(kIdUnits[h]) + " ratus";
  if (n % 100) out = join(out, " ", id_below100(n % 100));
  return out;
}
inline std::string id(uint32_t n) {
  if (n == 0) return "nol";
  std::string out;
  const uint32_t th = n / 1000;
  if (th == 1)
    out = "seribu";
  else if (th > 1)
    out = id_below1000(th) + " ribu";
  if (n % 1000) out = join(out, " ", id_below1000(n % 1000));
  return out;
}

// ---- Vietnamese
inline const char* const kViUnits[] = {"không", "một", "hai", "ba", "bốn", "năm", "sáu", "bảy", "tám", "chín"};

inline std::string vi_below100(uint32_t n) {
  if (n < 10) return kViUnits[n];
  const uint32_t t = n / 10, u = n % 10;
  std::string out = t == 1 ? "mười" : std::string(kViUnits[t]) + " mươi";
  if (!u) return out;
  const char* unit = u == 5 ? "lăm" : (u == 1 && t > 1) ? "mốt" : kViUnits[u];
  return out + " " + unit;
}
// `inner`: a higher group precedes, so hundreds are always read.
inline std::string vi_below1000(uint32_t n, bool inner) {
  const uint32_t h = n / 100, r = n % 100;
  if (!h && !inner) return vi_below100(r);
  std::string out = std::string(kViUnits[h]) + " trăm";
  if (!r) return out;
  if (r < 10) return out + " lẻ " + kViUnits[r];
  return out + " " + vi_below100(r);
}
inline std::string vi(uint32_t n) {
  if (n == 0) return "không";
  std::string out;
  const uint32_t th = n / 1000;
  if (th) out = vi_below1000(th, false) + " nghìn";
  if (n % 1000) out = join(out, " ", vi_below1000(n % 1000, th != 0));
  return out;
}

// ---- Chinese
inline const char* const kZhDigits[] = {"零", "一", "二", "三", "四", "五", "六", "七", "八", "九"};

inline std::string zh_section(uint32_t n) {  // 1..9999
  static const char* const units[] = {"千", "百", "十", ""};
  const uint32_t digits[] = {n / 1000, n / 100 % 10, n / 10 % 10, n % 10};
  std::string out;
  bool pending_zero = false;
  for (int i = 0; i < 4; ++i) {
    if (!digits[i]) {
      if (!out.empty()) pending_zero = true;
      continue;
    }
    if (pending_zero) out += "零";
    pending_zero = false;
    out += kZhDigits[digits[i]];
    out += units[i];
  }
  return out;
}
inline std::string zh(uint32_t n) {
  if (n == 0) return "零";
  std::string out;
  const uint32_t wan = n / 10000, rest = n % 10000;
  if (wan) out = zh_section(wan) + "万";
  if (rest) {
    if (wan && rest < 1000) out += "零";
    out += zh_section(rest);
  }
  if (out.rfind("一十", 0) == 0) out.erase(0, std::string_view("一").size());
  return out;
}

}  // namespace detail

inline bool has_rules(std::string_view rules) {
  for (auto r : {"en", "de", "fr", "es", "pt", "it", "ru", "id", "vi", "zh"})
    if (rules == r) return true;
  return false;
}

/// Spell a cardinal with the named rule table.
inline std::string spell_cardinal(std::string_view rules, uint32_t n) {
  if (n > kMaxCardinal) throw InvalidArgument("cardinal out of table range: " + std::to_string(n));
  if (rules == "en") return detail::en(n);
  if (rules == "de") return detail::de(n);
  if (rules == "fr") return detail::fr(n);
  if (rules == "es") return detail::es(n);
  if (rules == "pt") return detail::pt(n);
  if (rules == "it") return detail::it(n);
  if (rules == "ru") return detail::ru(n);
  if (rules == "id") return detail::id(n);
  if (rules == "vi") return detail::vi(n);
  if (rules == "zh") return detail::zh(n);
  throw InvalidArgument("unknown number rule table \"" + std::string(rules) + "\"");
}

/// Expand a run of ASCII digits: cardinal when it fits the table and has no
/// leading zero, otherwise digit by digit.
inline std::string expand_digits(std::string_view rules, std::string_view digits) {
  if (digits.empty()) return {};
  const bool cardinal = digits.size() <= 6 && (digits.size() == 1 || digits.front() != '0');
  if (cardinal) {
    uint32_t n = 0;
    for (char c : digits) n = n * 10 + static_cast<uint32_t>(c - '0');
    return spell_cardinal(rules, n);
  }
  std::string out;
  const std::string_view sep = rules == "zh" ? "" : " ";
  for (char c : digits) out = detail::join(out, sep, spell_cardinal(rules, static_cast<uint32_t>(c - '0')));
  return out;
}

}  // namespace lemas::numbers
