#include "synth_data.hpp"

namespace pgr::synth {

using FT = FactType;

const std::vector<Scenario>& scenarios() {
  static const std::vector<Scenario> all = {
      {"Can you help me plan the weekend trip to {city}?",
       "Plan a weekend trip to {city}",
       {{"city", {"Lisbon", "Porto", "Seville", "Valencia"}},
        {"sport", {"squash", "badminton", "volleyball", "basketball"}},
        {"amount", {"300", "400", "450", "600"}}},
       {{"User booked flights to {city} for a weekend trip in late spring", FT::Event,
         "Confirm the booked flights to {city}", "weekend trip flights already booked", 1, true},
        {"User sprained an ankle playing {sport} and the physiotherapist advised avoiding long walks", FT::Event,
         "Account for the sprained ankle", "physiotherapist advised avoiding long walks", 1, false},
        {"User set a strict leisure budget of {amount} euros for this quarter", FT::Goal,
         "Keep spending inside the leisure budget", "strict quarterly limit of {amount} euros", 1, false},
        {"User prefers vegetarian restaurants and avoids seafood dishes", FT::Preference,
         "Pick vegetarian restaurants", "avoid seafood dishes", 2, false}}},

      {"What should I get {partner} for the birthday next week?",
       "Choose a birthday present for {partner}",
       {{"partner", {"Maya", "Jonas", "Priya", "Tomas"}}},
       {{"{partner} has a birthday dinner planned at home next week", FT::Event,
         "Work around the birthday dinner next week", "{partner} celebrates at home", 1, true},
        {"User's partner recently started pottery classes at a community studio", FT::Interest,
         "Consider the new pottery hobby", "classes at the community studio", 1, false},
        {"User is saving aggressively for an apartment deposit and cut discretionary purchases", FT::Goal,
         "Respect the apartment deposit savings plan", "discretionary purchases were cut", 1, false},
        {"User's partner wants fewer physical possessions after decluttering", FT::Preference,
         "Favor experiences over physical possessions", "partner is decluttering", 2, false},
        {"User's partner is allergic to lavender and strong fragrances", FT::Identity,
         "Avoid lavender and strong fragrances", "partner allergy", 2, false}}},

      {"Build me a training schedule for the {race} marathon",
       "Prepare a training schedule for the {race} marathon",
       {{"race", {"Berlin", "Chicago", "Boston", "Tokyo"}}},
       {{"User registered for the {race} marathon taking place in autumn", FT::Event,
         "Count back from the {race} marathon date", "registered for the autumn race", 1, true},
        {"User works rotating night shifts at the hospital every other week", FT::Activity,
         "Fit runs around rotating night shifts", "hospital shifts every other week", 1, false},
        {"User's doctor flagged low iron levels during the annual checkup", FT::Event,
         "Address the low iron levels first", "doctor flagged them at the annual checkup", 1, false},
        {"User only has access to a treadmill in the building gym", FT::Activity,
         "Plan sessions on the treadmill", "building gym access only", 2, false}}},

      {"Help me host a dinner party on Saturday",
       "Host a dinner party on Saturday",
       {{"guest", {"Aisha", "Bruno", "Keiko", "Omar"}}},
       {{"User invited six colleagues to a dinner party on Saturday", FT::Event,
         "Prepare for six invited colleagues", "dinner party guest list", 1, true},
        {"User's oven broke and the repair technician arrives in two weeks", FT::Event,
         "Cook without the broken oven", "repair technician arrives in two weeks", 1, false},
        {"{guest} from the office follows a strict gluten free diet", FT::Identity,
         "Include gluten free dishes for {guest}", "strict diet from the office", 2, false},
        {"User's upstairs neighbor complained about noise after ten pm", FT::Event,
         "Keep noise down after ten pm", "upstairs neighbor complained", 2, false}}},

      {"Should I sign up for the {course} bootcamp?",
       "Decide on the {course} bootcamp",
       {{"course", {"data science", "UX design", "cloud engineering", "cybersecurity"}}},
       {{"User received a brochure for the {course} bootcamp with an early signup discount", FT::Event,
         "Compare the early signup discount", "{course} bootcamp brochure", 1, true},
        {"User's manager promised a promotion review in March", FT::Goal,
         "Weigh the promotion review in March", "manager promised it", 1, false},
        {"User is enrolled in an evening Spanish course twice weekly", FT::Activity,
         "Check clashes with the evening Spanish course", "twice weekly lessons", 1, false},
        {"User's laptop battery barely lasts an hour and needs replacement", FT::Event,
         "Replace the failing laptop battery", "barely lasts an hour", 2, false},
        {"User coaches a youth football team on weekday evenings", FT::Activity,
         "Protect the youth football coaching evenings", "weekday evenings", 2, false}}},

      {"Can you organize my move to the new apartment?",
       "Organize the move to the new apartment",
       {},
       {{"User signed the lease for the new apartment starting next month", FT::Event,
         "Schedule around the lease start", "new apartment from next month", 1, true},
        {"User owns an upright piano that requires professional movers", FT::Identity,
         "Book professional movers for the upright piano", "", 1, false},
        {"User's cat gets severely stressed during car rides", FT::Identity,
         "Reduce stress for the cat", "car rides upset it severely", 2, false},
        {"User has a herniated disc and cannot lift heavy boxes", FT::Identity,
         "Avoid lifting heavy boxes", "herniated disc", 2, false}}},

      {"What vegetables should I plant in the garden this spring?",
       "Choose vegetables for the spring garden",
       {},
       {{"User cleared a small garden plot behind the house this spring", FT::Activity,
         "Size the cleared garden plot", "small plot behind the house", 1, true},
        {"User travels for work most of July and August", FT::Activity,
         "Handle watering during July and August travel", "travels for work", 1, false},
        {"User's toddler has a severe tomato allergy", FT::Identity,
         "Skip tomato plants because of the toddler allergy", "severe reaction", 2, false},
        {"User's backyard only gets morning sunlight because of tall oak trees", FT::Identity,
         "Choose crops for morning sunlight", "tall oak trees shade the backyard", 2, false}}},

      {"Is it a good time to upgrade my gaming PC?",
       "Decide whether to upgrade the gaming PC now",
       {},
       {{"User's gaming PC struggles with new releases at high settings", FT::Event,
         "Measure how the gaming PC handles new releases", "struggles at high settings", 1, true},
        {"User's graphics card overheated twice during long sessions last month", FT::Event,
         "Diagnose the overheating graphics card", "long sessions last month", 1, false},
        {"User already spent the vacation money on concert tickets", FT::Event,
         "Check funds after the concert tickets", "vacation money already spent", 2, false},
        {"User promised to finish one game before buying another", FT::Goal,
         "Honor the promise to finish one game before buying another", "", 2, false}}},

      {"Plan activities for my parents visiting in {month}",
       "Plan activities for the parents' visit in {month}",
       {{"month", {"April", "May", "June", "October"}}},
       {{"User's parents confirmed they are visiting in {month} for ten days", FT::Event,
         "Cover ten days of the parents' visit", "confirmed for {month}", 1, true},
        {"User's father uses a wheelchair after hip surgery", FT::Identity,
         "Choose wheelchair accessible outings", "father recovering from hip surgery", 1, false},
        {"User's mother loves botanical gardens and classical concerts", FT::Preference,
         "Include botanical gardens or classical concerts for the mother", "", 1, false},
        {"User's guest room is currently filled with renovation materials", FT::Event,
         "Clear the renovation materials from the guest room", "", 2, false}}},

      {"Help me choose a new car",
       "Choose a new car",
       {},
       {{"User test drove a new hybrid car at the dealership", FT::Event,
         "Compare with the hybrid test drive", "dealership visit", 1, true},
        {"User commutes ninety kilometers daily on mountain roads", FT::Activity,
         "Handle the ninety kilometer mountain commute", "daily roads", 1, false},
        {"User is expecting twins in November", FT::Event,
         "Make room for twins arriving in November", "", 2, false},
        {"User installed solar panels with a home charging point", FT::Event,
         "Use the home charging point from the solar panels", "", 2, false}}},
  };
  return all;
}

const std::vector<DistractorTemplate>& distractors() {
  static const std::vector<DistractorTemplate> all = {
      {"User watched a documentary about {animal} migration", FT::Interest,
       {{"animal", {"whale", "penguin", "elephant", "monarch butterfly", "salmon", "caribou"}}}},
      {"User repainted the {room} walls {color}", FT::Activity,
       {{"room", {"hallway", "bathroom", "study", "kitchen"}}, {"color", {"sage green", "pale yellow", "navy", "terracotta"}}}},
      {"User enjoys {genre} podcasts while cooking", FT::Preference,
       {{"genre", {"history", "comedy", "true crime", "science", "economics", "philosophy"}}}},
      {"User bought a {item} at a flea market", FT::Event,
       {{"item", {"brass lamp", "vinyl record player", "wooden chess set", "vintage mirror", "ceramic vase"}}}},
      {"User collects vintage {collectible}", FT::Interest,
       {{"collectible", {"postcards", "fountain pens", "comic books", "stamps", "film cameras"}}}},
      {"User attended a {topic} workshop downtown", FT::Event,
       {{"topic", {"calligraphy", "photography", "woodworking", "bookbinding", "origami", "watercolor"}}}},
      {"User's friend {name} relocated to {country}", FT::Event,
       {{"name", {"Lena", "Marco", "Sofia", "Daniel", "Hana"}}, {"country", {"Canada", "Norway", "Chile", "Japan", "Kenya"}}}},
      {"User reorganized the bookshelf by {criterion}", FT::Activity,
       {{"criterion", {"color", "author surname", "genre", "height"}}}},
      {"User started journaling about {topic} every morning", FT::Activity,
       {{"topic", {"gratitude", "dreams", "reading notes", "mood"}}}},
      {"User volunteered at the {place} fundraiser", FT::Event,
       {{"place", {"library", "animal shelter", "museum", "food bank"}}}},
      {"User listened to the latest {band} album on repeat", FT::Preference,
       {{"band", {"Radiohead", "Khruangbin", "Fleetwood Mac", "Beirut", "Portishead"}}}},
      {"User fixed a squeaky {object} hinge", FT::Activity,
       {{"object", {"cupboard", "wardrobe", "gate", "window"}}}},
      {"User tried a {cuisine} recipe with mixed results", FT::Activity,
       {{"cuisine", {"Ethiopian", "Korean", "Peruvian", "Moroccan", "Georgian"}}}},
      {"User borrowed a {tool} from a neighbor for a few days", FT::Event,
       {{"tool", {"ladder", "pressure washer", "drill", "sewing machine"}}}},
      {"User renewed the {document} at the municipal office", FT::Event,
       {{"document", {"passport", "driving licence", "residence permit", "library card"}}}},
      {"User joined a {hobby} club that meets monthly", FT::Interest,
       {{"hobby", {"chess", "birdwatching", "astronomy", "knitting", "board game"}}}},
      {"User dislikes {weather} weather", FT::Preference,
       {{"weather", {"humid", "foggy", "windy", "muggy"}}}},
      {"User's sister {name} adopted a {pet}", FT::Event,
       {{"name", {"Clara", "Nadia", "Elif", "Rosa"}}, {"pet", {"rescue greyhound", "parrot", "tortoise", "ferret"}}}},
      {"User follows {team} results closely", FT::Interest,
       {{"team", {"Liverpool", "Ajax", "Celtic", "Benfica", "Napoli"}}}},
      {"User finished reading a novel by {author}", FT::Activity,
       {{"author", {"Ishiguro", "Ferrante", "Murakami", "Atwood", "Tokarczuk"}}}},
      {"User switched to {drink} in the afternoons", FT::Preference,
       {{"drink", {"green tea", "rooibos", "decaf coffee", "sparkling water"}}}},
      {"User replaced the {appliance} filter", FT::Activity,
       {{"appliance", {"vacuum cleaner", "water jug", "air purifier", "dishwasher"}}}},
  };
  return all;
}

const PersonaPools& persona_pools() {
  static const PersonaPools pools{
      {"Alex", "Sam", "Jordan", "Riley", "Morgan", "Casey", "Jamie", "Robin"},
      {"nurse", "software developer", "teacher", "architect", "accountant", "journalist", "pharmacist"},
      {"Rotterdam", "Leeds", "Lyon", "Graz", "Gdansk", "Bilbao", "Aarhus"},
      {"cycling", "reading", "cooking", "photography", "hiking", "music"},
  };
  return pools;
}

}  // namespace pgr::synth
