//! Shipped emoji table: codepoint sequence to ASCII token.

pub(crate) static EMOJI_TABLE: &[(&str, &str)] = &[
    ("\u{1F600}", "grinning_face"),
    ("\u{1F601}", "grinning_face_with_smiling_eyes"),
    ("\u{1F602}", "face_with_tears_of_joy"),
    ("\u{1F603}", "smiling_face_with_open_mouth"),
    ("\u{1F604}", "smiling_face_with_open_mouth_and_smiling_eyes"),
    ("\u{1F605}", "smiling_face_with_open_mouth_and_cold_sweat"),
    ("\u{1F606}", "smiling_face_with_open_mouth_and_tightly_closed_eyes"),
    ("\u{1F607}", "smiling_face_with_halo"),
    ("\u{1F608}", "smiling_face_with_horns"),
    ("\u{1F609}", "winking_face"),
    ("\u{1F60A}", "smiling_face_with_smiling_eyes"),
    ("\u{1F60B}", "face_savouring_delicious_food"),
    ("\u{1F60C}", "relieved_face"),
    ("\u{1F60D}", "smiling_face_with_heart_shaped_eyes"),
    ("\u{1F60E}", "smiling_face_with_sunglasses"),
    ("\u{1F60F}", "smirking_face"),
    ("\u{1F610}", "neutral_face"),
    ("\u{1F611}", "expressionless_face"),
    ("\u{1F612}", "unamused_face"),
    ("\u{1F613}", "face_with_cold_sweat"),
    ("\u{1F614}", "pensive_face"),
    ("\u{1F615}", "confused_face"),
    ("\u{1F616}", "confounded_face"),
    ("\u{1F617}", "kissing_face"),
    ("\u{1F618}", "face_throwing_a_kiss"),
    ("\u{1F619}", "kissing_face_with_smiling_eyes"),
    ("\u{1F61A}", "kissing_face_with_closed_eyes"),
    ("\u{1F61B}", "face_with_stuck_out_tongue"),
    ("\u{1F61C}", "face_with_stuck_out_tongue_and_winking_eye"),
    ("\u{1F61D}", "face_with_stuck_out_tongue_and_tightly_closed_eyes"),
    ("\u{1F61E}", "disappointed_face"),
    ("\u{1F61F}", "worried_face"),
    ("\u{1F620}", "angry_face"),
    ("\u{1F621}", "pouting_face"),
    ("\u{1F622}", "crying_face"),
    ("\u{1F623}", "persevering_face"),
    ("\u{1F624}", "face_with_look_of_triumph"),
    ("\u{1F625}", "disappointed_but_relieved_face"),
    ("\u{1F626}", "frowning_face_with_open_mouth"),
    ("\u{1F627}", "anguished_face"),
    ("\u{1F628}", "fearful_face"),
    ("\u{1F629}", "weary_face"),
    ("\u{1F62A}", "sleepy_face"),
    ("\u{1F62B}", "tired_face"),
    ("\u{1F62C}", "grimacing_face"),
    ("\u{1F62D}", "loudly_crying_face"),
    ("\u{1F62E}", "face_with_open_mouth"),
    ("\u{1F62F}", "hushed_face"),
    ("\u{1F630}", "face_with_open_mouth_and_cold_sweat"),
    ("\u{1F631}", "face_screaming_in_fear"),
    ("\u{1F632}", "astonished_face"),
    ("\u{1F633}", "flushed_face"),
    ("\u{1F634}", "sleeping_face"),
    ("\u{1F635}", "dizzy_face"),
    ("\u{1F636}", "face_without_mouth"),
    ("\u{1F637}", "face_with_medical_mask"),
    ("\u{1F638}", "grinning_cat_face_with_smiling_eyes"),
    ("\u{1F639}", "cat_face_with_tears_of_joy"),
    ("\u{1F63A}", "smiling_cat_face_with_open_mouth"),
    ("\u{1F63B}", "smiling_cat_face_with_heart_shaped_eyes"),
    ("\u{1F63C}", "cat_face_with_wry_smile"),
    ("\u{1F63D}", "kissing_cat_face_with_closed_eyes"),
    ("\u{1F63E}", "pouting_cat_face"),
    ("\u{1F63F}", "crying_cat_face"),
    ("\u{1F640}", "weary_cat_face"),
    ("\u{1F641}", "slightly_frowning_face"),
    ("\u{1F642}", "slightly_smiling_face"),
    ("\u{1F643}", "upside_down_face"),
    ("\u{1F644}", "face_with_rolling_eyes"),
    ("\u{1F645}", "face_with_no_good_gesture"),
    ("\u{1F646}", "face_with_ok_gesture"),
    ("\u{1F647}", "person_bowing_deeply"),
    ("\u{1F648}", "see_no_evil_monkey"),
    ("\u{1F649}", "hear_no_evil_monkey"),
    ("\u{1F64A}", "speak_no_evil_monkey"),
    ("\u{1F64B}", "happy_person_raising_one_hand"),
    ("\u{1F64C}", "person_raising_both_hands_in_celebration"),
    ("\u{1F64D}", "person_frowning"),
    ("\u{1F64E}", "person_with_pouting_face"),
    ("\u{1F64F}", "person_with_folded_hands"),
    ("\u{1F910}", "zipper_mouth_face"),
    ("\u{1F911}", "money_mouth_face"),
    ("\u{1F912}", "face_with_thermometer"),
    ("\u{1F913}", "nerd_face"),
    ("\u{1F914}", "thinking_face"),
    ("\u{1F915}", "face_with_head_bandage"),
    ("\u{1F916}", "robot_face"),
    ("\u{1F917}", "hugging_face"),
    ("\u{1F918}", "sign_of_the_horns"),
    ("\u{1F919}", "call_me_hand"),
    ("\u{1F91A}", "raised_back_of_hand"),
    ("\u{1F91B}", "left_facing_fist"),
    ("\u{1F91C}", "right_facing_fist"),
    ("\u{1F91D}", "handshake"),
    ("\u{1F91E}", "hand_with_index_and_middle_fingers_crossed"),
    ("\u{1F91F}", "i_love_you_hand_sign"),
    ("\u{1F920}", "face_with_cowboy_hat"),
    ("\u{1F921}", "clown_face"),
    ("\u{1F922}", "nauseated_face"),
    ("\u{1F923}", "rolling_on_the_floor_laughing"),
    ("\u{1F924}", "drooling_face"),
    ("\u{1F925}", "lying_face"),
    ("\u{1F926}", "face_palm"),
    ("\u{1F927}", "sneezing_face"),
    ("\u{1F928}", "face_with_one_eyebrow_raised"),
    ("\u{1F929}", "grinning_face_with_star_eyes"),
    ("\u{1F92A}", "grinning_face_with_one_large_and_one_small_eye"),
    ("\u{1F92B}", "face_with_finger_covering_closed_lips"),
    ("\u{1F92C}", "serious_face_with_symbols_covering_mouth"),
    ("\u{1F92D}", "smiling_face_with_smiling_eyes_and_hand_covering_mouth"),
    ("\u{1F92E}", "face_with_open_mouth_vomiting"),
    ("\u{1F92F}", "shocked_face_with_exploding_head"),
    ("\u{1F970}", "smiling_face_with_smiling_eyes_and_three_hearts"),
    ("\u{1F973}", "face_with_party_horn_and_party_hat"),
    ("\u{1F974}", "face_with_uneven_eyes_and_wavy_mouth"),
    ("\u{1F975}", "overheated_face"),
    ("\u{1F976}", "freezing_face"),
    ("\u{1F97A}", "face_with_pleading_eyes"),
    ("\u{1F440}", "eyes"),
    ("\u{1F441}", "eye"),
    ("\u{1F442}", "ear"),
    ("\u{1F443}", "nose"),
    ("\u{1F444}", "mouth"),
    ("\u{1F445}", "tongue"),
    ("\u{1F446}", "white_up_pointing_backhand_index"),
    ("\u{1F447}", "white_down_pointing_backhand_index"),
    ("\u{1F448}", "white_left_pointing_backhand_index"),
    ("\u{1F449}", "white_right_pointing_backhand_index"),
    ("\u{1F44A}", "fisted_hand_sign"),
    ("\u{1F44B}", "waving_hand_sign"),
    ("\u{1F44C}", "ok_hand_sign"),
    ("\u{1F44D}", "thumbs_up_sign"),
    ("\u{1F44E}", "thumbs_down_sign"),
    ("\u{1F44F}", "clapping_hands_sign"),
    ("\u{1F450}", "open_hands_sign"),
    ("\u{1F451}", "crown"),
    ("\u{1F452}", "womans_hat"),
    ("\u{1F453}", "eyeglasses"),
    ("\u{1F454}", "necktie"),
    ("\u{1F455}", "t_shirt"),
    ("\u{1F456}", "jeans"),
    ("\u{1F457}", "dress"),
    ("\u{1F458}", "kimono"),
    ("\u{1F459}", "bikini"),
    ("\u{1F45A}", "womans_clothes"),
    ("\u{1F45B}", "purse"),
    ("\u{1F45C}", "handbag"),
    ("\u{1F45D}", "pouch"),
    ("\u{1F45E}", "mans_shoe"),
    ("\u{1F45F}", "athletic_shoe"),
    ("\u{1F460}", "high_heeled_shoe"),
    ("\u{1F461}", "womans_sandal"),
    ("\u{1F462}", "womans_boots"),
    ("\u{1F484}", "lipstick"),
    ("\u{1F485}", "nail_polish"),
    ("\u{1F48B}", "kiss_mark"),
    ("\u{1F48E}", "gem_stone"),
    ("\u{1F490}", "bouquet"),
    ("\u{1F493}", "beating_heart"),
    ("\u{1F494}", "broken_heart"),
    ("\u{1F495}", "two_hearts"),
    ("\u{1F496}", "sparkling_heart"),
    ("\u{1F497}", "growing_heart"),
    ("\u{1F498}", "heart_with_arrow"),
    ("\u{1F499}", "blue_heart"),
    ("\u{1F49A}", "green_heart"),
    ("\u{1F49B}", "yellow_heart"),
    ("\u{1F49C}", "purple_heart"),
    ("\u{1F49D}", "heart_with_ribbon"),
    ("\u{1F49E}", "revolving_hearts"),
    ("\u{1F49F}", "heart_decoration"),
    ("\u{1F4AF}", "hundred_points_symbol"),
    ("\u{1F4A9}", "pile_of_poo"),
    ("\u{1F4A5}", "collision_symbol"),
    ("\u{1F4AA}", "flexed_biceps"),
    ("\u{1F525}", "fire"),
    ("\u{2728}", "sparkles"),
    ("\u{2B50}", "white_medium_star"),
    ("\u{1F31F}", "glowing_star"),
    ("\u{1F308}", "rainbow"),
    ("\u{2600}", "black_sun_with_rays"),
    ("\u{1F319}", "crescent_moon"),
    ("\u{1F338}", "cherry_blossom"),
    ("\u{1F339}", "rose"),
    ("\u{1F33A}", "hibiscus"),
    ("\u{1F33B}", "sunflower"),
    ("\u{1F33C}", "blossom"),
    ("\u{1F337}", "tulip"),
    ("\u{1F389}", "party_popper"),
    ("\u{1F38A}", "confetti_ball"),
    ("\u{1F381}", "wrapped_present"),
    ("\u{1F380}", "ribbon"),
    ("\u{1F3B6}", "multiple_musical_notes"),
    ("\u{1F4F8}", "camera_with_flash"),
    ("\u{1F4F7}", "camera"),
    ("\u{1F6CD}", "shopping_bags"),
    ("\u{1F576}", "dark_sunglasses"),
    ("\u{1F97F}", "flat_shoe"),
    ("\u{1F9E3}", "scarf"),
    ("\u{1F9E4}", "gloves"),
    ("\u{1F9E5}", "coat"),
    ("\u{1F9E6}", "socks"),
    ("\u{1F48D}", "ring"),
    ("\u{1F46F}", "woman_with_bunny_ears"),
    ("\u{1F483}", "dancer"),
    ("\u{1F57A}", "man_dancing"),
    ("\u{270C}", "victory_hand"),
    ("\u{270B}", "raised_hand"),
    ("\u{2705}", "white_heavy_check_mark"),
    ("\u{274C}", "cross_mark"),
    ("\u{2714}", "heavy_check_mark"),
    ("\u{1F4A4}", "sleeping_symbol"),
    ("\u{1F4A2}", "anger_symbol"),
    ("\u{1F4A6}", "splashing_sweat_symbol"),
    ("\u{1F4A8}", "dash_symbol"),
    ("\u{1F4AB}", "dizzy_symbol"),
    ("\u{1F4AC}", "speech_balloon"),
    ("\u{1F5A4}", "black_heart"),
    ("\u{1F90D}", "white_heart"),
    ("\u{1F90E}", "brown_heart"),
    ("\u{1F9E1}", "orange_heart"),
    ("\u{2764}\u{FE0F}", "red_heart"),
    ("\u{2764}", "red_heart"),
    ("\u{2665}\u{FE0F}", "heart_suit"),
    ("\u{1F1FA}\u{1F1F8}", "flag_us"),
    ("\u{1F1EC}\u{1F1E7}", "flag_gb"),
    ("\u{1F1EB}\u{1F1F7}", "flag_fr"),
    ("\u{1F1EE}\u{1F1F9}", "flag_it"),
    ("\u{1F1EF}\u{1F1F5}", "flag_jp"),
];
