#pragma once

// Welch two-sample reference values computed with scipy.stats.ttest_ind
// (equal_var=False); dof is the Welch-Satterthwaite value.

#include <vector>

namespace osim::testing {

struct WelchCase {
  std::vector<double> a;
  std::vector<double> b;
  double t;
  double dof;
  double p;
};

inline const std::vector<WelchCase>& welch_reference() {
  static const std::vector<WelchCase> cases = {
      {{0.5, 0.6, 0.7},
       {0.1, 0.2, 0.3},
       4.898979485566356, 3.9999999999999996, 0.008049893100837717},
      {{-0.747918, 0.075866, -1.967008, -2.817077, 1.622334, 1.398502, 0.561071, 0.51424, -0.036348},
       {1.603583, -0.123265, 0.878562, 3.186833, -0.676656},
       -1.3473265783603303, 8.149739562114286, 0.21413378657572188},
      {{-0.67735, 1.984936, 0.640694, 0.146804, -4.733508, -3.232238},
       {-0.87823, 0.265135, 1.419277, 1.114792, -1.26614, 0.323271, 1.409726, 0.751939, -0.257276, -0.792811, 1.528038, 0.110734, -0.599131},
       -1.1442465114295204, 5.674270190058179, 0.298483912225277},
      {{-0.288927, -0.614752, -0.711693, 0.221326, -0.572508, 0.551958, -0.270631, 0.68941, 0.396829, -0.166026, -0.235431},
       {0.51742, -0.870828, -1.052533, -0.990893, -0.154546, -0.200386, -1.375773, -0.378453, -0.315837, -0.77037, -0.156903, 0.379839, -1.238555, -0.793127, 0.209312},
       1.8442935737526682, 23.59914044418874, 0.07773088507567003},
      {{-1.953061, -1.277915, -2.774243, -1.257159, -2.063323, 0.615978, 1.04168},
       {-4.044001, 2.678752, -2.835752, 1.057233},
       -0.1847926574255599, 3.6983265872889746, 0.8630770252351158},
      {{-1.456735, -0.460573, -0.938752, -0.615643, -0.75404, -0.850535, -1.318134, -0.772242, -1.233191, -1.09563, -0.901826, -0.96013},
       {0.217606, 1.240222, 0.265913},
       -4.42809665228729, 2.259613422906741, 0.03774500215980423},
      {{0.38039, -0.2166, 1.582489, 0.365811, -0.66824, -0.703141, -1.131267, -0.125376, 0.318406},
       {-0.572431, -1.706756, 0.263112, -0.299803, 0.433834, 0.212854, -0.308145, 1.87293, -1.965052, -0.679373, -0.341049, 1.174443},
       0.335591750906539, 18.99801127221909, 0.740856404814342},
      {{-0.959627, -0.818497, -0.728864, 1.14682, -0.696428, 0.149786, 0.790629, 0.489248, -1.869379, -0.586364, 1.225723, 0.054957, 1.784909, 1.69373},
       {-0.866083, -1.172687, -0.113018, -0.799827, -0.259699, -1.104425, 0.012155, -0.485359, -1.803721, -0.97117, -0.978516, -1.23399, 0.02823, -0.438749, -2.649916},
       2.7898899354214923, 22.012967148435763, 0.010674105891262345},
      {{-0.823739, 0.768945, -1.940073},
       {-2.253886, -1.206189, -0.024141, -0.599791, -0.378001, -0.884676, -0.578517, -1.966638, -1.702152, -2.232004},
       0.6260753388013475, 2.4421100509815408, 0.5848099867522975},
      {{1.143312, -1.063428, -1.236987, -0.345578, 4.236545, -1.64445, 0.705078, -1.129512, -1.435929},
       {0.533264, 0.354749, -0.518451, 1.446639, 0.563926, 0.019809, 0.054189, 0.108491, -0.33372, -0.873242},
       -0.3342245686912361, 9.696874490624221, 0.7453258798684572},
      {{-0.053515, -0.431264},
       {0.688896, 0.690114, 0.560436, 0.632146, 0.534869, 0.672772, 0.5289, 0.623095, 0.468861, 0.628362, 0.685159, 0.641314},
       -4.500435039386506, 1.0250761111395295, 0.13460429079595188},
      {{1.585659, -0.397445, 3.097983},
       {0.06481, -1.394105},
       1.677964803024418, 2.9990149512410023, 0.19197666971625582},
      {{1.057656, 0.73737, 0.835014, 1.463003, 1.365345, 0.567572, 0.825629, 0.587737},
       {-0.24133, -0.192429, -1.916419, -0.184051, -1.993774, -0.175054, -1.303462, -0.564244},
       5.7340649347603705, 9.436249136437475, 0.00023585659910233081},
      {{-0.719032, -1.084573, 0.602102, 0.1328, 0.157283, -0.249707, -0.88205, -0.305989, -0.911608},
       {1.71736, -0.278741, 0.706857, -0.316715, 1.460408, 0.429864, 0.191465, 0.61717, 0.918475, 1.067844, -0.481573, -0.179872},
       -2.9893809037256363, 18.878369074353945, 0.007574519268279527},
      {{-2.089627, -0.497721, -0.816603, 0.110437, 0.017007},
       {0.816678, 1.229276, 1.202587, 0.945595, 0.92699, 0.588351, 1.508481, 1.281635, 1.153086},
       -4.241779941528377, 4.442436129096488, 0.010567902454523439},
      {{-1.196962, -0.213007, -0.146072},
       {-1.26344, -0.449592, -0.20369, -1.777122, -0.833557, -0.945688, 0.028737, -0.572919, -0.443875},
       0.5148044452558979, 3.295871269631966, 0.6392460633227315},
      {{0.079954, 0.476212, 0.521911, 0.183195, 0.453629, 0.1858, -0.060884, 0.326682, 0.419832, 0.335315, 0.060097, 0.232419},
       {-0.789939, -0.762422, -0.675377, -0.745554, -0.773476, -0.821473},
       18.05274669398151, 13.756839746340745, 5.6787533040224704e-11},
      {{-0.384669, -0.265803, 0.514004, 0.12181, 1.61174, 1.607785, -0.765865, 0.388514, 1.489944, 1.22587, 1.5066, -0.664925, -1.268398},
       {-0.870889, -0.925453, -0.362192},
       3.326619978864201, 11.961521355696691, 0.006060411698667768},
      {{1.81175, 2.375287, 2.966747, -0.329411, -2.240427},
       {0.100037, 0.134578, 0.086812, 0.039874, 0.085984, -0.00912, 0.169452, 0.088036, 0.092242, -0.032934, 0.107549, 0.00471, -0.004704, -0.064603, 0.120081},
       0.8858321964965907, 4.002647443483747, 0.4257202429953734},
      {{-1.588997, -0.086551, 4.331086, -1.885592, 0.797402, -0.316221, 0.23951, -0.971207, 1.976674, 2.794194, 1.483684, 0.310553, -2.507274, 1.733694, 1.548089},
       {1.000428, -1.003113, 1.351963},
       0.0846771716516719, 3.9658037748911563, 0.9366201722381262},
      {{0.509736, 1.661963, 0.405515, -0.031419, 0.409337, 1.46224, 0.052261},
       {2.188642, 1.070026, 1.509791, 0.231363, 1.422882, 0.440872, 0.274306, -1.023271, -0.14221, -0.087373, 1.473199, 1.106222, 0.532298, 0.885841, 0.691751},
       -0.2037266635893072, 14.239243601454081, 0.8414499731101678},
      {{0.282193, -0.056357, -0.212078, -0.818905, -0.255152},
       {1.337807, -0.491833, 0.904587, 0.909429, 3.77054, 0.813696, 2.428048, -0.991422, 0.551694, 2.846174},
       -2.8639060531087983, 11.320199456844676, 0.015011473691695061},
      {{0.5596, 0.700775, 0.168606},
       {-1.817097, 0.321159, 2.023649, 1.148931, 0.179154, 0.394942, -1.458756, -0.102747, -1.280826},
       1.2048881200563473, 9.66186803794337, 0.2569288474214375},
      {{1.148539, 0.378137, 0.804464, 0.794493, 1.079434, 0.376072, 0.291714, 0.817517, 1.034926, 0.946934, 1.035676, 1.311484, 0.526476, 1.407598},
       {0.769728, 0.472631, 0.194454, 0.598978, 0.225887, 0.987601, 0.146864, 0.355687, 0.883547, 0.297543, 0.804972},
       2.536877558621911, 22.784265669092697, 0.018502566996655385},
      {{-0.544068, -0.138366, -0.09414, 0.041917, -0.002433, -0.300999, -0.374543, -0.238354},
       {1.223138, 0.789047, 0.921021, 1.097671, 0.6729, 0.66667, 0.793758},
       -10.215900450372642, 12.414840732607523, 2.1118210867142098e-07},
      {{-0.34171, -1.420606, -1.053749, -0.371687, -1.460811, -1.057948, 0.869017, -1.272253, -1.802438, -1.323412, -1.129204, -0.613304},
       {0.508454, 0.027365, 0.571163, 0.581252, 0.91947},
       -5.722524062723206, 14.748690999360669, 4.309599354598569e-05},
      {{-0.562589, -0.693899, -0.363861, -0.324867, -0.5476, -1.179554, -0.520986, -0.856716, -0.07601, -0.520069, -1.250012, -0.481071},
       {-0.025247, 2.497564, 0.079509, 1.320024},
       -2.627366239533799, 3.1646506821067173, 0.07426145844949174},
      {{-0.562712, 0.211171, -0.680007, -0.394419, -0.195628},
       {-0.343922, -1.048502, -0.71955, -1.126689, -1.193509, -0.572182, -0.698055},
       2.4881836496871945, 8.155745700689996, 0.03709065486068336},
      {{0.489185, 0.393281, 0.065019, -0.246711, -0.239787, -0.183701, 0.946215},
       {-2.810572, -4.036627},
       5.653403874998887, 1.1609945693247223, 0.08737986848862583},
      {{-0.296724, -0.740694, 0.294426},
       {-0.870908, -0.822432, -0.761319, 2.595028, 0.238448},
       -0.4447942512691513, 5.356994072314597, 0.6738688368718035},
      {{-1.179927, -0.365824, -0.639414, -1.616652, -1.240171, -0.233675},
       {0.139186, -1.624879, -0.613783, -3.000643, -0.982783, -0.189045, -1.230368, -2.053539, -2.845557, -0.584498, -0.336495, -0.348095, -1.05139},
       0.7125984259409942, 16.179533656647305, 0.4862448910299654},
      {{-0.358865, -0.736136, -0.548779, -0.206852, -0.508656, -0.609767, -1.170086, -0.358519, -0.444743},
       {-2.479328, -1.547039, -0.727583, -3.231382, -1.530475, -1.289814, -0.832029, -0.330769, 0.902735, -0.200273},
       1.5040810460210015, 10.119851712915862, 0.16311225451275757},
      {{1.0174, 0.661567, 1.343775, 1.684155, -0.387911, 0.135288, 2.476067, 0.211079, 1.024075, 2.701781},
       {0.746894, 0.066456, 0.758716, -0.065924, 0.923605, 1.316364, 0.316773, 0.410678, 0.617548, 0.019553, 0.100125, 0.980082, 0.193269, 0.946444, -0.095116},
       1.795372143179974, 11.431286236306216, 0.09905119162975616},
      {{-0.367989, 2.866205, -0.229034, 1.322226, 3.569064, -2.208276, 3.388751, 2.455525, -1.879938, 4.697672},
       {0.532292, -0.731183, 1.67414, 2.073705},
       0.4791639098613637, 10.620129424713413, 0.6415361341720452},
      {{0.621655, 1.398094, -1.011829, -0.236423, -0.393109, -1.453374, 0.701564, 0.944653},
       {0.513486, -2.396897},
       0.6764377226373706, 1.1215416062319346, 0.6111550294695434},
      {{-0.050037, 1.230969},
       {0.025416, 0.003844, -0.252241, 1.069876, 0.911731, 1.043355, 0.849492, -0.278748, 0.063977, 0.100227, -0.640912},
       0.4916505797312662, 1.164725298512519, 0.6995131595127856},
      {{-1.118051, -0.865354, -0.70713, -1.702926, -0.432798, -2.028608, 0.223483, -2.621737, -1.841218, -0.283304, -1.037981, -3.329686, 0.963618, -0.981466},
       {0.991201, 0.175314},
       -3.3745160053682612, 2.3239867722383782, 0.06292041399946899},
      {{1.533637, -0.69036, 4.123706, -1.574838, -1.196408, 0.319228, -1.992782, 2.515146, -0.433172, 1.111163, -2.388186, 0.801209, -2.949571, 3.288865, 1.471437},
       {0.543915, 0.137067, -0.011898, -0.950922, -0.675237, -0.312574, -0.694955, 0.581321, -0.323287, -0.273885, -0.965949, -0.800426, 0.373276, -0.588057, -1.104183},
       1.0636144291265501, 15.933347343295909, 0.30335812012572333},
      {{-2.050163, 0.639665, -0.092137, -3.633095, 2.578647, 2.24529, -0.7121, 0.138612, 2.615603, 0.696629, -0.888305, 0.057964, -0.525449, -0.987703},
       {-2.602876, -1.6962, 0.112252, -1.317042, -2.547513, 1.479236, -1.186695, 0.996153, -2.469157, -1.993556},
       1.7048333195484344, 21.17988312193049, 0.10285201142732645},
      {{0.085999, -0.304474, -1.435629, -0.733098, -1.093598, -1.259403, -0.664632, -1.191636, -0.888089, 0.953204, 0.723601, -1.187127, 0.090389},
       {0.720417, 0.854734, -0.744049, 1.025314, 1.108502, 0.144798, 0.707952, -0.363654},
       -2.9735567692627027, 16.57620057850559, 0.008699715158512446},
      {{0.111819, -1.696525, -0.051035, -0.498525, 1.541594, 3.098363, -0.325145, 2.28417},
       {-1.449773, -0.794502, 2.537304, -1.627193, 2.00111},
       0.4036097209669255, 7.236958492731459, 0.6981600374634496},
      {{1.23033, 2.005724},
       {1.675559, 3.777392},
       -0.9895542497994996, 1.2672439464721725, 0.4738543658487926},
      {{0.985754, 0.174694, 0.640079, -0.593955, 0.348566, -0.358208, 0.917784, 1.747192, 0.157418, 0.338191, 0.050264, -0.864885},
       {1.423568, -0.276258, 0.319078, 1.929008, -0.39236, 0.175745, 1.741643, 0.313058, 0.470919, -0.91358, -0.551946, 0.7578},
       -0.36119638207232396, 20.938593386387737, 0.7215715497670752},
      {{-1.079204, -1.746223, -0.768855, -1.475948, -1.746848, -2.063303, -1.895477, -0.396938, -1.266417, -1.650428, 0.095104, -1.225005},
       {-0.679645, -1.821199, 0.546345, -1.994908, 1.341232, -2.882917, -1.01374, -1.535541, -0.823265, -2.883713, -1.627653, -0.728011},
       -0.22933275478449364, 16.480949706857015, 0.821432126238345},
      {{-1.425342, 0.615957, 0.160352, 0.43513, 0.612416, 0.032095, -0.271005, -0.012581, 0.184888, -1.050894, 1.807427, 0.295337, -0.998854},
       {-0.382516, 0.264724, 0.531019, 0.135472, 0.146605, -0.083085, 0.177149, -0.059993, 0.129174, -0.070371, 0.532292, 0.497285},
       -0.49210766912366444, 14.783667628402542, 0.6298703907992609},
      {{-0.482578, -0.300738, -0.743635},
       {2.600331, -1.399701, -0.294141, -1.273527, -0.543235, -0.492095, 1.631114},
       -0.9278554514207816, 6.57573056125673, 0.3862734089159295},
      {{3.437674, 2.635836, 0.020817, -2.200894},
       {-1.544017, -2.170103, -1.269074, -1.018446, -0.74231, -0.501667, -0.447964, -0.656918, 0.142199, -1.15877, -0.584842},
       1.4459989937207707, 3.128986867000265, 0.2403643612669093},
      {{-1.022476, -0.855731, -0.464981, 2.524964, -0.710677, -0.549109, -0.595685, -0.365979, 0.609396, 0.851362, 0.405585},
       {-1.514845, -2.335382, -0.153668},
       1.8576196015212132, 3.0647289341545285, 0.1582614618939245},
      {{-0.589054, -1.28071, -0.470671, 2.88918, -0.035713, -1.109099, 0.83647, 0.329922, -1.249033, -0.471221, 1.515106},
       {1.669021, 0.369971, 0.868422, 2.284439, -0.082416, 0.78941, 0.185493, 0.529048, 1.314665, 0.822316, 0.456725},
       -1.8220627025422453, 15.269697155209256, 0.08808930905314548},
      {{0.582227, 0.482192, -4.399931, 0.539896, -3.216127, 2.101634, -4.133501, 1.536794},
       {2.732453, 0.986634, -0.974395, -3.139028, -0.353466, 0.057451, 0.320635, -1.953218, -1.227218, 0.145491, 2.750557, 0.83313},
       -0.779856359816718, 10.997715506606736, 0.4519325609326309},
  };
  return cases;
}

}  // namespace osim::testing
